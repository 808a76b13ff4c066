"""Plain-text sparse triplet format for operators and state vectors.

::

    # dilute-fermi sparse-triplet 1
    # basis <sha256 descriptor of the basis>
    # shape <rows> <cols>
    # nnz <count>
    <row> <col> <re> <im>
    ...

Entries are sorted by ``(row, col)`` and printed with 17 significant digits,
so equal matrices give byte-identical files.  State vectors use the same
header with ``cols = 1``.
"""

from __future__ import annotations

import io

import numpy as np
import scipy.sparse as sp

from .basis import FockBasis
from .operators import SparseOperator

__all__ = ["dumps_operator", "loads_operator", "dumps_state", "loads_state", "BasisMismatch", "FormatError"]

MAGIC = "# dilute-fermi sparse-triplet 1"


class BasisMismatch(ValueError):
    pass


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _dump(mat: sp.spmatrix, descriptor: str) -> str:
    coo = mat.tocoo()
    order = np.lexsort((coo.col, coo.row))
    out = io.StringIO()
    out.write(f"{MAGIC}\n# basis {descriptor}\n# shape {mat.shape[0]} {mat.shape[1]}\n# nnz {coo.nnz}\n")
    for i in order:
        z = complex(coo.data[i])
        out.write(f"{coo.row[i]} {coo.col[i]} {_fmt(z.real)} {_fmt(z.imag)}\n")
    return out.getvalue()


def _load(text: str):
    lines = text.splitlines()
    if len(lines) < 4 or lines[0] != MAGIC:
        raise FormatError("missing sparse-triplet header")
    try:
        descriptor = lines[1].split()[2]
        rows, cols = (int(x) for x in lines[2].split()[2:4])
        nnz = int(lines[3].split()[2])
    except (IndexError, ValueError) as exc:
        raise FormatError(f"malformed header: {exc}") from None
    body = lines[4:]
    if len(body) != nnz:
        raise FormatError(f"header announces {nnz} entries, found {len(body)}")
    if nnz:
        arr = np.array([ln.split() for ln in body], dtype=object)
        r = arr[:, 0].astype(np.int64)
        c = arr[:, 1].astype(np.int64)
        v = arr[:, 2].astype(float) + 1j * arr[:, 3].astype(float)
    else:
        r = c = np.zeros(0, dtype=np.int64)
        v = np.zeros(0, dtype=complex)
    return descriptor, sp.csr_matrix((v, (r, c)), shape=(rows, cols)), (rows, cols)


def dumps_operator(op: SparseOperator) -> str:
    if op.basis is not op.target and op.basis.descriptor != op.target.descriptor:
        desc = f"{op.target.descriptor}:{op.basis.descriptor}"
    else:
        desc = op.basis.descriptor
    return _dump(op.matrix, desc)


def loads_operator(text: str, basis: FockBasis, target: FockBasis | None = None) -> SparseOperator:
    target = basis if target is None else target
    descriptor, mat, shape = _load(text)
    expected = basis.descriptor if target is basis else f"{target.descriptor}:{basis.descriptor}"
    if descriptor != expected:
        raise BasisMismatch("operator was written for a different basis")
    if shape != (target.dim, basis.dim):
        raise FormatError(f"shape {shape} does not match the basis")
    return SparseOperator(mat, basis, target)


def dumps_state(psi: np.ndarray, basis: FockBasis) -> str:
    return _dump(sp.csr_matrix(np.asarray(psi, dtype=complex).reshape(-1, 1)), basis.descriptor)


def loads_state(text: str, basis: FockBasis) -> np.ndarray:
    descriptor, mat, shape = _load(text)
    if descriptor != basis.descriptor:
        raise BasisMismatch("state was written for a different basis")
    if shape != (basis.dim, 1):
        raise FormatError(f"shape {shape} does not match the basis")
    return mat.toarray().ravel()
