"""Backend selection for the F_p elimination kernels.

The compiled extension is used when it was built; otherwise the numpy
implementation in ``_kernels_py`` is used.  Both expose ``rref(m, p)`` and
``batch_rank(mats, p)`` with identical semantics.
"""

try:
    from nilalg import _ckernels as _impl

    BACKEND = "cython"
except ImportError:  # extension not built
    from nilalg import _kernels_py as _impl

    BACKEND = "python"

rref = _impl.rref
batch_rank = _impl.batch_rank

__all__ = ["BACKEND", "rref", "batch_rank"]
