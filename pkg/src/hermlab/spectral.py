"""First eigenvalue, eigenfunctions, and diameters of the built-in compact geometries.

Two routes:

* flat tori: exact Fourier spectrum of the Laplace-de Rham operator on
  functions (smallest nonzero dual-lattice norm squared);
* the Fubini-Study projective line: geodesic icosphere of radius 1/sqrt(2),
  cotangent-weight stiffness with barycentric-lumped mass, smallest nonzero
  eigenvalue by shifted inverse iteration with the constant mode deflated.

The mesh route never feeds the identity-verification suite; analytic
eigenfunctions do.  Diameters are analytic per geometry, never estimated
from meshes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .charts import GeometryCatalogueEntry
from .errors import ResolutionError, UnsupportedGeometryError
from .fields import ScalarField
from .hodge import scalar_laplacian


@dataclass
class SpectralResult:
    lambda1: float                    # inverse length^2
    eigenfunction: Optional[ScalarField]
    diameter: float
    method: str                       # "fourier-exact" | "mesh-cotangent"
    resolution: int
    residual: float
    mesh: Optional[dict] = None       # vertices, faces, eigenvector (mesh route)

    def __post_init__(self):
        if self.lambda1 <= 0:
            raise ValueError("lambda1 must be positive")


FOURIER_RESIDUAL_TOL = 1e-10
MESH_RESIDUAL_TOL = 1e-8


def torus_spectrum(entry: GeometryCatalogueEntry) -> SpectralResult:
    """Exact spectrum of the cubic-lattice flat torus."""
    if entry.period is None:
        raise UnsupportedGeometryError("torus_spectrum needs a flat-torus entry")
    n = entry.n
    period = entry.period
    k0 = 2.0 * math.pi / period
    lam = k0 ** 2
    u = entry.eigenfunction
    # residual of the eigenvalue equation on a small deterministic grid
    res = 0.0
    for t in np.linspace(0.1, period - 0.1, 7):
        z = np.zeros(n, dtype=complex)
        z[0] = t
        res = max(res, abs(scalar_laplacian(entry.metric, u, z) - lam * u.value(z)))
    return SpectralResult(
        lambda1=lam,
        eigenfunction=u,
        diameter=0.5 * period * math.sqrt(2.0 * n),
        method="fourier-exact",
        resolution=0,
        residual=res,
    )


def analytic_eigenfunction(entry: GeometryCatalogueEntry) -> ScalarField:
    if entry.eigenfunction is None:
        raise UnsupportedGeometryError(f"no eigenfunction registered for {entry.name}")
    return entry.eigenfunction


def diameter(entry: GeometryCatalogueEntry) -> float:
    if entry.diameter is None:
        raise UnsupportedGeometryError(f"no analytic diameter for {entry.name}")
    return entry.diameter


# -- icosphere mesh -------------------------------------------------------------


def icosphere(subdivisions: int, radius: float = 1.0):
    """Geodesic sphere from a subdivided icosahedron; (vertices, faces)."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=int,
    )
    verts /= np.linalg.norm(verts, axis=1)[:, None]

    for _ in range(subdivisions):
        edge_mid = {}
        new_faces = []
        vlist = [v for v in verts]

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in edge_mid:
                mid = vlist[i] + vlist[j]
                mid /= np.linalg.norm(mid)
                vlist.append(mid)
                edge_mid[key] = len(vlist) - 1
            return edge_mid[key]

        for (a, b, c) in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
        verts = np.array(vlist)
        faces = np.array(new_faces, dtype=int)

    return radius * verts, faces


def cotan_laplacian(verts: np.ndarray, faces: np.ndarray):
    """(stiffness, lumped mass) of the cotangent discretization."""
    nv = len(verts)
    I, J, V = [], [], []
    mass = np.zeros(nv)
    for (a, b, c) in faces:
        pa, pb, pc = verts[a], verts[b], verts[c]
        area = 0.5 * np.linalg.norm(np.cross(pb - pa, pc - pa))
        mass[[a, b, c]] += area / 3.0
        for (i, j, k) in ((a, b, c), (b, c, a), (c, a, b)):
            # cotangent at vertex k, opposite edge (i, j)
            e1 = verts[i] - verts[k]
            e2 = verts[j] - verts[k]
            cot = float(e1 @ e2) / np.linalg.norm(np.cross(e1, e2))
            w = 0.5 * cot
            I += [i, j, i, j]
            J += [j, i, i, j]
            V += [-w, -w, w, w]
    S = sp.csr_matrix((V, (I, J)), shape=(nv, nv))
    M = sp.diags(mass)
    return S, M


def smallest_nonzero_eigenpair(S, M, tol: float = 1e-10, max_iter: int = 200, shift: float = 1e-3):
    """Inverse iteration on (S, M) with the constant vector deflated.

    Solves (S + shift*M) x = M y repeatedly, projecting out the constant mode
    in the M-inner product; converges when the Rayleigh quotient changes by
    less than tol.
    """
    nv = S.shape[0]
    mdiag = M.diagonal()
    ones = np.ones(nv)
    mnorm = float(ones @ (mdiag * ones))

    def deflate(x):
        return x - (float(ones @ (mdiag * x)) / mnorm) * ones

    solve = spla.factorized((S + shift * M).tocsc())
    rng = np.random.default_rng(12345)
    x = deflate(rng.standard_normal(nv))
    x /= math.sqrt(float(x @ (mdiag * x)))
    lam_old = np.inf
    lam = np.inf
    res_norm = np.inf
    for _ in range(max_iter):
        x = solve(mdiag * x)
        x = deflate(x)
        x /= math.sqrt(float(x @ (mdiag * x)))
        lam = float(x @ (S @ x))
        res = S @ x - lam * (mdiag * x)
        res_norm = float(np.linalg.norm(res)) / max(
            float(np.linalg.norm(mdiag * x)) * abs(lam), 1e-300
        )
        if abs(lam - lam_old) < tol * max(1.0, abs(lam)) and res_norm < 1e-9:
            break
        lam_old = lam
    return lam, x, res_norm


def sphere_fs_spectrum(entry: GeometryCatalogueEntry, subdivisions: int = 5) -> SpectralResult:
    """Mesh eigenvalue of the Fubini-Study projective line (round sphere, R = 1/sqrt(2))."""
    if not entry.name.startswith("fubini-study:1"):
        raise UnsupportedGeometryError("mesh spectrum is built in only for fubini-study:1")
    if subdivisions < 3:
        raise ResolutionError("need at least 3 icosphere subdivisions")
    radius = 1.0 / math.sqrt(2.0)
    verts, faces = icosphere(subdivisions, radius=radius)
    S, M = cotan_laplacian(verts, faces)
    lam, vec, res = smallest_nonzero_eigenpair(S, M)
    return SpectralResult(
        lambda1=lam,
        eigenfunction=entry.eigenfunction,
        diameter=math.pi / math.sqrt(2.0),
        method="mesh-cotangent",
        resolution=subdivisions,
        residual=res,
        mesh={"vertices": verts, "faces": faces, "eigenvector": vec},
    )


def spectrum(entry: GeometryCatalogueEntry, subdivisions: int = 5, prefer_mesh: bool = False):
    """Spectral result for a built-in geometry; raises if unsupported."""
    if entry.period is not None:
        return torus_spectrum(entry)
    if entry.name.startswith("fubini-study:1"):
        if prefer_mesh:
            return sphere_fs_spectrum(entry, subdivisions)
        u = entry.eigenfunction
        res = 0.0
        for r in (0.2, 0.7, 1.3):
            z = np.array([r + 0.1j])
            res = max(res, abs(scalar_laplacian(entry.metric, u, z) - entry.exact_lambda1 * u.value(z)))
        return SpectralResult(
            lambda1=entry.exact_lambda1,
            eigenfunction=u,
            diameter=entry.diameter,
            method="fourier-exact",
            resolution=0,
            residual=res,
        )
    raise UnsupportedGeometryError(f"no spectral support for {entry.name}")
