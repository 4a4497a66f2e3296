"""Walk-kernel backend selection.

The compiled extension is preferred; the pure-Python twin is used when the
extension is unavailable or when PCCSEG_PURE_PYTHON=1 is set. Both produce
bit-identical trajectories.
"""

from __future__ import annotations

import os

if os.environ.get("PCCSEG_PURE_PYTHON") == "1":
    from . import _pykernel as _impl
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernel as _impl

BACKEND: str = _impl.BACKEND
seed_state = _impl.seed_state
step_particle = _impl.step_particle
run_rounds = _impl.run_rounds
