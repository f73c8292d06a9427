"""Inference-time planning engine bindings.

The compiled extension carries the full API: the bandit selector
(ucb_scores/select/update/simulate_bandit), evaluation metrics, the agent
reply parsers, and solve_scripted for end-to-end runs over a deterministic
rule-table backend.
"""

try:
    from ._planforge import *  # noqa: F401,F403  (installed package layout)
    from . import _planforge as _ext
except ImportError:  # in-tree build: extension sits on PYTHONPATH
    from _planforge import *  # noqa: F401,F403
    import _planforge as _ext

__doc__ = _ext.__doc__
__all__ = [name for name in dir(_ext) if not name.startswith("_")]
