"""Fourth-order tensors a[i,j,k,l] on R^3: symmetry classes, matricization, forms.

Index conventions, fixed once here and used everywhere else:

* An elasticity tensor satisfies a[ijkl] = a[jikl] = a[ijlk] (swap inside
  either index pair). A weakly symmetric tensor satisfies only the joint
  swap t[ijkl] = t[jilk].
* The 9x9 matricization places t[ijkl] at row 3*(k-1)+i, column 3*(l-1)+j
  (1-based), i.e. a 3x3 grid of 3x3 blocks where block (k, l) holds the
  matrix (t[ijkl])_ij. Under this layout weak symmetry of the tensor is
  exactly symmetry of the matrix, and for z = vec(Z) stacking the columns
  of a 3x3 matrix Z, z^T M z equals sum over ijkl of t[ijkl] z[ik] z[jl].
* The bi-quadratic form pairs x with the first index pair and y with the
  second: A(x,x,y,y) = sum a[ijkl] x_i x_j y_k y_l.

Arrays are float64 throughout, shape (3, 3, 3, 3), zero-based in code.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricInput, SymmetryViolation

__all__ = [
    "Pair4",
    "Elast4",
    "make_elast4",
    "make_pair4",
    "symmetrize_pairs",
    "orbit_spread",
    "unfold",
    "fold",
    "vec",
    "unvec",
    "contract_yy",
    "contract_xx",
    "contract_zz",
    "biquadratic",
    "tensor_e",
    "tensor_choi_lam",
    "tensor_isotropic",
    "tensor_two_squares",
    "tensor_from_rank_one_terms",
    "random_tensor",
    "random_spd_tensor",
]


def _as_tensor_array(raw) -> np.ndarray:
    arr = np.array(raw, dtype=float)
    if arr.shape == (81,):
        arr = arr.reshape(3, 3, 3, 3)
    if arr.shape != (3, 3, 3, 3):
        raise ValueError(f"expected shape (3,3,3,3), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("tensor entries must be finite")
    return arr


@dataclass(frozen=True)
class Pair4:
    """Weakly symmetric tensor: t[ijkl] == t[jilk] exactly.

    The entry array is stored read-only; instances are safe to share.
    Construction checks the invariant to exact equality, so go through
    make_pair4 for noisy input.
    """

    a: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(_as_tensor_array(self.a))
        self._check_invariant(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "a", arr)

    @staticmethod
    def _check_invariant(arr: np.ndarray) -> None:
        if not np.array_equal(arr, arr.transpose(1, 0, 3, 2)):
            raise SymmetryViolation(
                float(np.max(np.abs(arr - arr.transpose(1, 0, 3, 2)))), 0.0
            )

    def norm(self) -> float:
        """Frobenius norm over all 81 entries."""
        return float(np.linalg.norm(self.a))


@dataclass(frozen=True)
class Elast4(Pair4):
    """Elasticity tensor: symmetric inside each index pair, exactly."""

    @staticmethod
    def _check_invariant(arr: np.ndarray) -> None:
        if not np.array_equal(arr, arr.transpose(1, 0, 2, 3)) or not np.array_equal(
            arr, arr.transpose(0, 1, 3, 2)
        ):
            spread = max(
                float(np.max(np.abs(arr - arr.transpose(1, 0, 2, 3)))),
                float(np.max(np.abs(arr - arr.transpose(0, 1, 3, 2)))),
            )
            raise SymmetryViolation(spread, 0.0)


def symmetrize_pairs(raw) -> np.ndarray:
    """Average raw entries over the pair-swap orbit.

    Done in two commutative stages so the result is bit-exactly invariant
    under both swaps (IEEE addition commutes, so (a+b)/2 == (b+a)/2).
    """
    arr = _as_tensor_array(raw)
    m = 0.5 * (arr + arr.transpose(1, 0, 2, 3))
    return 0.5 * (m + m.transpose(0, 1, 3, 2))


def orbit_spread(raw) -> float:
    """Largest max-min disagreement across any pair-swap orbit."""
    arr = _as_tensor_array(raw)
    variants = np.stack(
        [
            arr,
            arr.transpose(1, 0, 2, 3),
            arr.transpose(0, 1, 3, 2),
            arr.transpose(1, 0, 3, 2),
        ]
    )
    return float(np.max(variants.max(axis=0) - variants.min(axis=0)))


def make_elast4(raw, tol: float = 1e-8) -> Elast4:
    """Canonicalize raw entries into an Elast4 by orbit averaging.

    Raises SymmetryViolation when entries inside one orbit disagree by more
    than tol; small disagreements (measurement noise) are averaged away.
    """
    spread = orbit_spread(raw)
    if spread > tol:
        raise SymmetryViolation(spread, tol)
    return Elast4(symmetrize_pairs(raw))


def make_pair4(raw, tol: float = 1e-8) -> Pair4:
    """Canonicalize raw entries into a Pair4 (joint-swap average)."""
    arr = _as_tensor_array(raw)
    spread = float(np.max(np.abs(arr - arr.transpose(1, 0, 3, 2))))
    if spread > tol:
        raise SymmetryViolation(spread, tol)
    return Pair4(0.5 * (arr + arr.transpose(1, 0, 3, 2)))


def unfold(t: Pair4) -> np.ndarray:
    """9x9 matricization; symmetric exactly when t is weakly symmetric."""
    arr = t.a if isinstance(t, Pair4) else _as_tensor_array(t)
    return np.ascontiguousarray(arr.transpose(2, 0, 3, 1).reshape(9, 9))


def fold(m, tol: float = 1e-8) -> Pair4:
    """Inverse of unfold. The input must be symmetric within tol.

    The matrix is symmetrized exactly before folding so the result always
    satisfies the weak-symmetry invariant bit-for-bit; for an already
    symmetric input this is the identity and unfold(fold(m)) == m.
    """
    mat = np.asarray(m, dtype=float)
    if mat.shape != (9, 9):
        raise ValueError(f"expected shape (9,9), got {mat.shape}")
    asym = float(np.max(np.abs(mat - mat.T)))
    if asym > tol:
        raise AsymmetricInput(
            f"matrix asymmetry {asym:.3e} exceeds tolerance {tol:.3e}"
        )
    sym = 0.5 * (mat + mat.T)
    return Pair4(sym.reshape(3, 3, 3, 3).transpose(1, 3, 0, 2))


def vec(z) -> np.ndarray:
    """Column-stacking vectorization of a 3x3 matrix; vec(Z)[3k+i] = Z[i,k]."""
    zm = np.asarray(z, dtype=float)
    if zm.shape != (3, 3):
        raise ValueError(f"expected shape (3,3), got {zm.shape}")
    return zm.T.reshape(9).copy()


def unvec(u) -> np.ndarray:
    """Inverse of vec."""
    uv = np.asarray(u, dtype=float)
    if uv.shape != (9,):
        raise ValueError(f"expected shape (9,), got {uv.shape}")
    return uv.reshape(3, 3).T.copy()


def contract_yy(t, y, with_asymmetry: bool = False):
    """Contract the second index pair with y twice: M_ij = sum_kl t[ijkl] y_k y_l.

    Returns the symmetrized 3x3 matrix. For an Elast4 the raw contraction is
    already symmetric and symmetrization is a bit-exact no-op; for a general
    Pair4 pass with_asymmetry=True to also get the norm of the discarded
    antisymmetric part.
    """
    arr = t.a if isinstance(t, Pair4) else _as_tensor_array(t)
    yv = np.asarray(y, dtype=float)
    raw = np.einsum("ijkl,k,l->ij", arr, yv, yv)
    sym = 0.5 * (raw + raw.T)
    if with_asymmetry:
        return sym, float(np.linalg.norm(raw - raw.T))
    return sym


def contract_xx(t, x) -> np.ndarray:
    """Contract the first index pair with x twice: N_kl = sum_ij t[ijkl] x_i x_j."""
    arr = t.a if isinstance(t, Pair4) else _as_tensor_array(t)
    xv = np.asarray(x, dtype=float)
    raw = np.einsum("ijkl,i,j->kl", arr, xv, xv)
    return 0.5 * (raw + raw.T)


def contract_zz(t, z) -> float:
    """Quadratic form in a 3x3 matrix Z: sum t[ijkl] Z[i,k] Z[j,l]."""
    arr = t.a if isinstance(t, Pair4) else _as_tensor_array(t)
    zm = np.asarray(z, dtype=float)
    return float(np.einsum("ijkl,ik,jl->", arr, zm, zm))


def biquadratic(t, x, y) -> float:
    """Bi-quadratic form sum t[ijkl] x_i x_j y_k y_l."""
    arr = t.a if isinstance(t, Pair4) else _as_tensor_array(t)
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    return float(np.einsum("ijkl,i,j,k,l->", arr, xv, xv, yv, yv))


# ---------------------------------------------------------------------------
# Named tensors


def tensor_e() -> Elast4:
    """The tensor with e[iikk] = 1 whose form is (x.x)(y.y); unfolds to I9."""
    eye = np.eye(3)
    return Elast4(np.einsum("ij,kl->ijkl", eye, eye))


def tensor_choi_lam(gamma: float = 1.0) -> Elast4:
    """Classical bi-quadratic with form

        sum_s x_s^2 y_s^2 - 2(x1 x2 y1 y2 + x2 x3 y2 y3 + x3 x1 y3 y1)
        + gamma (x1^2 y2^2 + x2^2 y3^2 + x3^2 y1^2).

    Nonnegative for every x, y when gamma >= 1 even though no matrix-level
    positive representative exists at gamma = 1. Values below 1 are accepted
    but leave the nonnegative regime, so they are flagged with a warning.
    """
    if gamma < 1.0:
        warnings.warn(
            f"gamma={gamma} is below 1; the form is no longer nonnegative",
            stacklevel=2,
        )
    a = np.zeros((3, 3, 3, 3))
    for s in range(3):
        t = (s + 1) % 3
        a[s, s, s, s] = 1.0
        a[s, s, t, t] = gamma
        # The cross monomial -2 x_s x_t y_s y_t split evenly over its orbit.
        a[s, t, s, t] = a[t, s, s, t] = a[s, t, t, s] = a[t, s, t, s] = -0.5
    return Elast4(a)


def tensor_isotropic(lam: float, mu: float) -> Elast4:
    """Isotropic elasticity tensor with Lame parameters (lambda, mu).

    In the index pairing used here the entries are

        a[ijkl] = mu * d_ij d_kl + (lam + mu)/2 * (d_ik d_jl + d_il d_jk),

    which makes the bi-quadratic form mu (x.x)(y.y) + (lam + mu)(x.y)^2,
    the classical acoustic form whose minimum over unit spheres is
    min(mu, lam + 2 mu).
    """
    eye = np.eye(3)
    a = mu * np.einsum("ij,kl->ijkl", eye, eye) + 0.5 * (lam + mu) * (
        np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye)
    )
    return make_elast4(a, tol=1e-12)


def tensor_two_squares() -> Elast4:
    """Form 2(x1 y1 + x2 y2)^2 + 2 x3^2 y3^2: nonnegative, yet the 9x9
    unfolding is indefinite. The standard witness that matrix-level
    positivity is strictly stronger than form-level positivity."""
    a = np.zeros((3, 3, 3, 3))
    a[0, 0, 0, 0] = a[1, 1, 1, 1] = a[2, 2, 2, 2] = 2.0
    a[0, 1, 1, 0] = a[1, 0, 1, 0] = a[1, 0, 0, 1] = a[0, 1, 0, 1] = 1.0
    return Elast4(a)


def tensor_from_rank_one_terms(alphas, mats) -> Elast4:
    """Elasticity tensor whose contracted matrix A y^2 equals
    sum_s alpha_s (U_s y)(U_s y)^T.

    Entries are a[ijkl] = 1/2 sum_s alpha_s (U[ik] U[jl] + U[jk] U[il]),
    the symmetric placement of the monomials of the rank-one terms.
    """
    al = np.asarray(alphas, dtype=float)
    us = np.asarray(mats, dtype=float)
    if us.ndim != 3 or us.shape[1:] != (3, 3) or al.shape != (us.shape[0],):
        raise ValueError("need alphas (r,) and mats (r,3,3)")
    b = np.einsum("s,sik,sjl->ijkl", al, us, us)
    # b is weakly symmetric up to contraction rounding; the two-stage
    # average restores both pair symmetries bit-exactly.
    return Elast4(symmetrize_pairs(b))


def random_tensor(rng: np.random.Generator, scale: float = 1.0) -> Elast4:
    """Orbit-symmetrized standard normal entries, Frobenius norm = scale."""
    raw = symmetrize_pairs(rng.standard_normal((3, 3, 3, 3)))
    nrm = np.linalg.norm(raw)
    if nrm == 0.0:
        raw[0, 0, 0, 0] = scale
        return Elast4(symmetrize_pairs(raw))
    return Elast4(raw * (scale / nrm))


def random_spd_tensor(
    rng: np.random.Generator, min_eig_frac: float = 1e-3, max_tries: int = 200
) -> Elast4:
    """Random elasticity tensor whose unfolding is strictly PSD.

    Draws a random PSD 9x9 matrix, folds it, and orbit-averages into the
    elasticity class. The averaging acts on the unfolding like a partial
    transpose and can destroy definiteness, so candidates are re-verified
    and rejected until the smallest eigenvalue clears a relative margin.
    """
    for _ in range(max_tries):
        g = rng.standard_normal((9, 9))
        m = g @ g.T / 9.0
        folded = fold(m, tol=1e-12)
        cand = Elast4(symmetrize_pairs(folded.a))
        w = np.linalg.eigvalsh(unfold(cand))
        if w[0] >= min_eig_frac * max(1e-30, float(np.linalg.norm(cand.a))):
            return cand
    raise RuntimeError("failed to draw a strictly positive unfolding")
