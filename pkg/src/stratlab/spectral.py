"""Graph-Laplacian discretization of model spaces.

Pipeline: weighted point cloud -> epsilon-neighborhood kernel graph ->
weighted kernel Laplacian (consistency constant 1 for the Laplace-Beltrami
operator, with the kernel truncation absorbed into an analytic mass
normalization) -> low eigenpairs and carre-du-champ forms.

The node measure is the exact sample measure m_i = w_i, which makes
discrete integration by parts exact:
sum_i m_i Gamma(f, g)_i = <f, L g>_m identically, and L 1 = 0 identically.
Using the deterministic weights rather than random kernel degrees as the
measure avoids the dominant sampling-noise term in eigenvalue estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import eigh
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.sparse.linalg import eigsh
from scipy.spatial import cKDTree
from scipy.stats import chi2

from .montecarlo import SampleCloud
from .report import FidelityRangeError, NumericalError, ResolutionError

_DENSE_LIMIT = 4600


def kernel_mass(dim: int, eps: float, cutoff_mult: float = 4.0,
                moment: int = 2) -> float:
    """Exact flat-space mass of the truncated Gaussian kernel.

    moment=0 gives the plain mass of exp(-|z|^2/(4 eps^2)) over the ball
    |z| <= cutoff_mult * eps (used to turn kernel row sums into density
    estimates).  moment=2 gives the second-moment-matched mass — the value
    that makes the Laplacian consistency constant exactly 1 in flat d-space
    despite the truncation: (4 pi eps^2)^(d/2) P(chi2_{d+2} < cutoff^2/2).
    """
    if moment not in (0, 2):
        raise ValueError("moment must be 0 or 2")
    c2 = cutoff_mult ** 2 / 2.0
    dof = dim + moment
    return (4.0 * math.pi * eps * eps) ** (dim / 2.0) * chi2.cdf(c2, dof)


@dataclass
class DiscreteGraph:
    """Kernel graph over a sample cloud at bandwidth eps.

    The Laplacian is the weight-measure form: with kernel row masses
    D_i = sum_j k_ij w_j and the analytic kernel mass nu(dim, eps),
    L f = (D f - K (w f)) / (eps^2 nu).  It is self-adjoint for the exact
    sample measure m_i = w_i, annihilates constants identically, and has
    consistency constant exactly 1 (the truncation of the kernel at 4 eps
    is absorbed into nu).
    """

    cloud: SampleCloud
    eps: float
    kernel: sparse.csr_matrix        # k_ij = exp(-d^2 / (4 eps^2)), d <= 4 eps
    lengths: sparse.csr_matrix       # geodesic edge lengths (same sparsity)
    degrees: np.ndarray              # D_i = sum_j k_ij w_j
    measure: np.ndarray              # m_i = w_i
    cutoff_mult: float = 4.0

    @property
    def n(self) -> int:
        return self.cloud.n

    @property
    def norm_mass(self) -> float:
        return kernel_mass(self.cloud.model.dim, self.eps, self.cutoff_mult)

    @property
    def fidelity_max(self) -> float:
        """Largest eigenvalue the discretization resolves faithfully."""
        return 0.1 / self.eps ** 2

    def apply_laplacian(self, f: np.ndarray) -> np.ndarray:
        w = self.cloud.weights
        return (self.degrees * f - self.kernel @ (w * f)) / (
            self.eps ** 2 * self.norm_mass)

    def gamma(self, f: np.ndarray, g: np.ndarray = None) -> np.ndarray:
        """Carre du champ Gamma(f, g)_i (pointwise squared-gradient form)."""
        if g is None:
            g = f
        w = self.cloud.weights
        K = self.kernel
        # expand: sum_j k_ij w_j (f_j - f_i)(g_j - g_i)
        t1 = K @ (w * f * g)
        t2 = f * (K @ (w * g))
        t3 = g * (K @ (w * f))
        t4 = f * g * self.degrees
        raw = t1 - t2 - t3 + t4
        return raw / (2.0 * self.eps ** 2 * self.norm_mass)

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        return float(np.sum(self.measure * f * g))

    def dirichlet(self, f: np.ndarray) -> float:
        return self.inner(f, self.apply_laplacian(f))

    def gradient_norm(self, f: np.ndarray) -> np.ndarray:
        return np.sqrt(np.maximum(self.gamma(f), 0.0))

    def shortest_paths(self, source_indices) -> np.ndarray:
        """Graph-geodesic distances from the given nodes to all nodes."""
        return dijkstra(self.lengths, directed=False,
                        indices=np.asarray(source_indices, dtype=int))


def _candidate_pairs(cloud: SampleCloud, radius: float):
    emb = cloud.model.embed(cloud.points)
    if emb is not None:
        tree = cKDTree(np.asarray(emb, dtype=float))
        pairs = tree.query_pairs(r=radius, output_type="ndarray")
        if len(pairs) == 0:
            return (np.empty(0, dtype=int), np.empty(0, dtype=int),
                    np.empty(0))
        d = cloud.model.paired_distance(cloud.points[pairs[:, 0]],
                                        cloud.points[pairs[:, 1]])
        keep = d <= radius
        return pairs[keep, 0], pairs[keep, 1], d[keep]
    # no Lipschitz embedding: block-wise exact distances
    n = cloud.n
    block = max(1, int(4e7 // max(n, 1)))
    ii, jj, dd = [], [], []
    for start in range(0, n, block):
        stop = min(start + block, n)
        P = cloud.points[start:stop, None, :]
        Q = cloud.points[None, :, :]
        d = cloud.model.paired_distance(
            np.broadcast_to(P, (stop - start, n, cloud.points.shape[1])),
            np.broadcast_to(Q, (stop - start, n, cloud.points.shape[1])))
        loc_i, loc_j = np.nonzero(d <= radius)
        glob_i = loc_i + start
        keep = glob_i < loc_j
        ii.append(glob_i[keep])
        jj.append(loc_j[keep])
        dd.append(d[loc_i[keep], loc_j[keep]])
    return np.concatenate(ii), np.concatenate(jj), np.concatenate(dd)


_TARGET_NEIGHBORS = {1: 127.0, 2: 640.0, 3: 290.0}


def default_bandwidth(model, n: int) -> float:
    """Bandwidth giving a dimension-calibrated expected neighbor count.

    Matching the node count inside the kernel window across models keeps the
    sampling-noise floor of eigenvalue estimates comparable, so spectra of
    different models can be compared at equal resolution.
    """
    d = model.dim
    target = _TARGET_NEIGHBORS.get(d)
    if target is None:
        raise ValueError(f"no bandwidth calibration for dimension {d}")
    omega = math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)
    return 0.25 * (target * model.volume() / (n * omega)) ** (1.0 / d)


def build_graph(cloud: SampleCloud, eps: float,
                cutoff_mult: float = 4.0) -> DiscreteGraph:
    """Assemble the kernel graph at bandwidth eps.

    Edges join points at distance <= cutoff_mult * eps with Gaussian weight
    exp(-d^2/(4 eps^2)).  Raises ResolutionError when the graph is not
    connected at this bandwidth.
    """
    if eps <= 0:
        raise ValueError("bandwidth eps must be positive")
    n = cloud.n
    radius = cutoff_mult * eps
    ii, jj, dd = _candidate_pairs(cloud, radius)
    kv = np.exp(-(dd / (2.0 * eps)) ** 2)
    rows = np.concatenate([ii, jj, np.arange(n)])
    cols = np.concatenate([jj, ii, np.arange(n)])
    kvals = np.concatenate([kv, kv, np.ones(n)])
    lvals = np.concatenate([dd, dd, np.zeros(n)])
    kernel = sparse.csr_matrix((kvals, (rows, cols)), shape=(n, n))
    lengths = sparse.csr_matrix(
        (np.concatenate([dd, dd]),
         (np.concatenate([ii, jj]), np.concatenate([jj, ii]))), shape=(n, n))
    n_comp, _ = connected_components(kernel, directed=False)
    if n_comp != 1:
        raise ResolutionError(
            f"kernel graph has {n_comp} components at eps={eps}; "
            "increase the bandwidth or the sample size")
    w = cloud.weights
    # density normalization: divide each edge by the kernel-density estimate
    # at both endpoints.  This cancels sampling-density fluctuations in the
    # Dirichlet form to second order (they are the dominant eigenvalue noise)
    # while keeping the kernel symmetric.
    nu0 = kernel_mass(cloud.model.dim, eps, cutoff_mult, moment=0)
    q = (kernel @ w) / nu0
    if np.any(q <= 0):
        raise ResolutionError("isolated node: zero kernel density")
    Q = sparse.diags(1.0 / q)
    kernel = (Q @ kernel @ Q).tocsr()
    degrees = kernel @ w
    return DiscreteGraph(cloud, eps, kernel, lengths, degrees, w.copy(),
                         cutoff_mult)


@dataclass
class SpectralData:
    """Low eigenpairs of the graph Laplacian, measure-orthonormal.

    ``raw_eigenvalues`` are the eigenvalues of the discrete operator itself;
    ``eigenvalues`` undo its second-order smoothing bias through the exact
    flat-space dispersion relation of the Gaussian kernel,
    lam_raw = (1 - exp(-lam eps^2)) / eps^2, inverted.  The map is strictly
    monotone, so ordering and multiplicities are unchanged.
    """

    graph: DiscreteGraph
    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray   # columns, <u_a, u_b>_m = delta_ab
    raw_eigenvalues: np.ndarray = None

    def __post_init__(self):
        if self.raw_eigenvalues is None:
            self.raw_eigenvalues = self.eigenvalues.copy()
        lam = self.eigenvalues
        if len(lam) >= 2 and lam[1] > 0 and lam[0] > 1e-6 * lam[1]:
            raise NumericalError(
                f"ground eigenvalue {lam[0]} is not numerically zero")

    @property
    def fidelity_max(self) -> float:
        return self.graph.fidelity_max

    def eigenvalue_count(self, lam: float) -> int:
        return int(np.sum(self.eigenvalues < lam))

    def check_residuals(self, rel_tol: float = 1e-8):
        g = self.graph
        for a in range(len(self.raw_eigenvalues)):
            u = self.eigenfunctions[:, a]
            lam = self.raw_eigenvalues[a]
            r = g.measure * (g.apply_laplacian(u) - lam * u)
            scale = max(abs(lam), 1.0 / g.eps ** 2 * 1e-3)
            if np.linalg.norm(r) > rel_tol * scale * np.linalg.norm(g.measure * u):
                raise NumericalError(
                    f"eigenpair {a} residual exceeds {rel_tol} relative")


def _dirichlet_matrix(graph: DiscreteGraph) -> sparse.csr_matrix:
    w = graph.cloud.weights
    W = sparse.diags(w)
    A = sparse.diags(w * graph.degrees) - W @ graph.kernel @ W
    return (A / (graph.eps ** 2 * graph.norm_mass)).tocsr()


def spectrum(graph: DiscreteGraph, k: int = 12) -> SpectralData:
    """Lowest k eigenpairs of the graph Laplacian.

    Dense generalized solve for moderate sizes, shift-inverted Lanczos with
    a deterministic start vector above that.
    """
    n = graph.n
    if k >= n:
        raise ValueError("requested more eigenpairs than nodes")
    A = _dirichlet_matrix(graph)
    m = graph.measure
    if n <= _DENSE_LIMIT:
        lam, U = eigh(A.toarray(), np.diag(m), subset_by_index=(0, k - 1))
    else:
        scale = sparse.diags(1.0 / np.sqrt(m))
        S = (scale @ A @ scale).tocsc()
        sigma = -1e-6 / graph.eps ** 2
        v0 = np.full(n, 1.0 / math.sqrt(n))
        lam, V = eigsh(S, k=k, sigma=sigma, which="LM", v0=v0)
        order = np.argsort(lam)
        lam, V = lam[order], V[:, order]
        U = scale @ V
        norms = np.sqrt(np.einsum("ia,i,ia->a", U, m, U))
        U = U / norms
    lam = np.maximum(lam, 0.0)
    # deterministic sign: largest-magnitude entry positive
    for a in range(U.shape[1]):
        j = np.argmax(np.abs(U[:, a]))
        if U[j, a] < 0:
            U[:, a] = -U[:, a]
    raw = np.asarray(lam, dtype=float)
    x = raw * graph.eps ** 2
    if np.any(x >= 0.5):
        raise FidelityRangeError(
            "requested eigenvalues beyond the kernel's resolvable range; "
            "decrease the bandwidth or request fewer eigenpairs")
    corrected = -np.log1p(-x) / graph.eps ** 2
    data = SpectralData(graph, corrected, np.asarray(U), raw)
    data.check_residuals()
    return data


def weyl_ratio(eigenvalues, lam: float, dim: int,
               fidelity_max: float = None) -> float:
    """Eigenvalue-counting ratio normalized so the round d-sphere gives 1.

    N(lam) * (2 pi)^d / (omega_d * vol(S^d) * lam^(d/2)); for other models
    the limit is vol(model)/vol(S^d).  Raises FidelityRangeError when lam
    exceeds the resolvable range of a discrete spectrum.
    """
    if lam <= 0:
        raise ValueError("counting threshold must be positive")
    if fidelity_max is not None and lam > fidelity_max:
        raise FidelityRangeError(
            f"threshold {lam} beyond resolvable range {fidelity_max}")
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    count = float(np.sum(eigenvalues < lam))
    from .links import sphere_area
    omega = math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)
    ref = sphere_area(dim)
    return count * (2.0 * math.pi) ** dim / (omega * ref * lam ** (dim / 2.0))


def sphere_eigenvalues(n: int, count: int) -> np.ndarray:
    """First eigenvalues of the round n-sphere with multiplicity."""
    out = []
    l = 0
    while len(out) < count:
        lam = l * (l + n - 1)
        if l == 0:
            mult = 1
        else:
            mult = (math.comb(n + l, n) - math.comb(n + l - 2, n))
        out.extend([float(lam)] * mult)
        l += 1
    return np.array(out[:count])


def spindle_eigenvalues(a: float, count: int, max_band: int = 200) -> np.ndarray:
    """First eigenvalues of the two-pole surface with cone angle 2*pi*a.

    Bands nu = |m|/a + l, eigenvalue nu(nu + 1); azimuthal orders m come in
    +/- pairs.
    """
    vals = []
    for m in range(0, max_band):
        for l in range(0, max_band):
            nu = m / a + l
            lam = nu * (nu + 1.0)
            mult = 1 if m == 0 else 2
            vals.extend([lam] * mult)
    vals.sort()
    return np.array(vals[:count])


def lichnerowicz_check(data: SpectralData, ricci_bound: float, dim: int,
                       slack: float = 0.07) -> 'CheckReport':
    """Spectral-gap bound lambda_1 >= dim * K / (dim - 1), with slack for
    discretization bias."""
    from .report import CheckReport
    if dim < 2:
        raise ValueError("dimension must be at least 2")
    lam1 = float(data.eigenvalues[1])
    bound = dim * ricci_bound / (dim - 1.0)
    margin = lam1 - bound * (1.0 - slack)
    return CheckReport.from_margin(
        name="lichnerowicz_gap",
        margin=margin,
        tolerance=0.0,
        n_samples=data.graph.n,
        seed=data.graph.cloud.seed,
        diagnostics={"lambda_1": lam1, "bound": bound, "slack": slack,
                     "eps": data.graph.eps},
    )
