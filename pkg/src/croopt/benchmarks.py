"""The 24-function shifted/rotated benchmark suite.

Each instance binds a base function to a dimension, box bounds of
[-100, 100] per element, a shift vector o, an orthogonal rotation matrix M
(identity where the function is unrotated), and a fixed scale factor. The
evaluation point is mapped by z = M(x - o) * scale (f13/f14 skip the shift)
before the base formula is applied. All global optima sit at value 0, up to
the truncated Schwefel 2.26 constant.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ObjectiveSpec
from .errors import ChecksumMismatch, DimensionMismatch, FormatError

DEFAULT_BOUND = 100.0
#: Shifts are drawn inside [-80, 80] so every shifted optimum stays strictly
#: interior to the box for every scale factor in the table.
SHIFT_ENVELOPE = 80.0
DEFAULT_TRANSFORM_SEED = 12345

_TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# base functions (operate on the transformed vector z)

def sphere(z):
    return float(z @ z)


def schwefel_1_2(z):
    # Diagonally weighted sphere: sum_i i * z_i^2. The double sum's inner
    # index runs over the outer variable, which is what collapses it.
    weights = np.arange(1, z.shape[0] + 1, dtype=float)
    return float(np.sum(weights * z * z))


def schwefel_2_21(z):
    return float(np.max(np.abs(z)))


def schwefel_2_22(z):
    a = np.abs(z)
    return float(a.sum() + a.prod())


def rosenbrock(z):
    return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2))


def discus(z):
    return float(1e6 * z[0] ** 2 + np.sum(z[1:] ** 2))


def ackley(z):
    n = z.shape[0]
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.sum(z * z) / n))
        - np.exp(np.sum(np.cos(_TWO_PI * z)) / n)
        + 20.0
        + np.e
    )


def schwefel_2_26(z):
    return float(418.9829 * z.shape[0] - np.sum(z * np.sin(np.sqrt(np.abs(z)))))


def rastrigin(z):
    return float(np.sum(z * z - 10.0 * np.cos(_TWO_PI * z) + 10.0))


def griewank(z):
    # Product divisor is the 1-based index itself, not its square root.
    i = np.arange(1, z.shape[0] + 1, dtype=float)
    return float(np.sum(z * z) / 4000.0 - np.prod(np.cos(z / i)) + 1.0)


def levy(z):
    y = 1.0 + 0.25 * (z + 1.0)
    head = np.sin(np.pi * y[0]) ** 2
    body = np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(y[1:]) ** 2))
    tail = (y[-1] - 1.0) ** 2 * (1.0 + np.sin(_TWO_PI * y[-1]) ** 2)
    return float(head + body + tail)


def u_penalty(z, a, k=100.0, m=4.0):
    """Boundary penalty: k(|z|-a)^m outside [-a, a], zero inside."""
    z = np.asarray(z, dtype=float)
    over = np.maximum(z - a, 0.0)
    under = np.maximum(-z - a, 0.0)
    return float(np.sum(k * (over**m + under**m)))


def penalized_1(z):
    head = np.sin(3.0 * np.pi * z[0]) ** 2
    body = np.sum((z[:-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * z[1:]) ** 2))
    tail = (z[-1] - 1.0) ** 2 * (1.0 + np.sin(_TWO_PI * z[-1]) ** 2)
    return float(0.1 * (head + body + tail) + u_penalty(z, 5.0))


def penalized_2(z):
    y = 1.0 + 0.25 * (z + 1.0)
    head = 10.0 * np.sin(np.pi * y[0]) ** 2
    body = np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
    tail = (y[-1] - 1.0) ** 2
    return float(np.pi / z.shape[0] * (head + body + tail) + u_penalty(z, 10.0))


_BASE_FUNCS = {
    "sphere": sphere,
    "schwefel_1_2": schwefel_1_2,
    "schwefel_2_21": schwefel_2_21,
    "schwefel_2_22": schwefel_2_22,
    "rosenbrock": rosenbrock,
    "discus": discus,
    "ackley": ackley,
    "schwefel_2_26": schwefel_2_26,
    "rastrigin": rastrigin,
    "griewank": griewank,
    "levy": levy,
    "penalized_1": penalized_1,
    "penalized_2": penalized_2,
}

#: Where the base function attains 0 (per transformed coordinate).
_BASE_OPTIMUM = {
    "rosenbrock": 1.0,
    "penalized_1": 1.0,
    "levy": -1.0,
    "penalized_2": -1.0,
    "schwefel_2_26": 420.9687,
}


@dataclass(frozen=True)
class FunctionDef:
    id: int
    base: str
    shifted: bool
    rotated: bool
    scale: float
    name: str


FUNCTION_TABLE = (
    FunctionDef(1, "sphere", True, False, 1.0, "Shifted Sphere"),
    FunctionDef(2, "schwefel_1_2", True, False, 1.0, "Shifted Schwefel 1.2"),
    FunctionDef(3, "schwefel_1_2", True, True, 1.0, "Shifted Rotated Schwefel 1.2"),
    FunctionDef(4, "schwefel_2_21", True, False, 1.0, "Shifted Schwefel 2.21"),
    FunctionDef(5, "schwefel_2_21", True, True, 1.0, "Shifted Rotated Schwefel 2.21"),
    FunctionDef(6, "schwefel_2_22", True, False, 0.1, "Shifted Schwefel 2.22"),
    FunctionDef(7, "schwefel_2_22", True, True, 0.1, "Shifted Rotated Schwefel 2.22"),
    FunctionDef(8, "rosenbrock", True, False, 0.3, "Shifted Rosenbrock"),
    FunctionDef(9, "rosenbrock", True, True, 0.3, "Shifted Rotated Rosenbrock"),
    FunctionDef(10, "discus", True, False, 1.0, "Shifted Discus"),
    FunctionDef(11, "ackley", True, False, 0.32, "Shifted Ackley"),
    FunctionDef(12, "ackley", True, True, 0.32, "Shifted Rotated Ackley"),
    FunctionDef(13, "schwefel_2_26", False, False, 5.0, "Schwefel 2.26"),
    FunctionDef(14, "schwefel_2_26", False, True, 5.0, "Rotated Schwefel 2.26"),
    FunctionDef(15, "rastrigin", True, False, 0.0512, "Shifted Rastrigin"),
    FunctionDef(16, "rastrigin", True, True, 0.0512, "Shifted Rotated Rastrigin"),
    FunctionDef(17, "griewank", True, False, 6.0, "Shifted Griewank"),
    FunctionDef(18, "griewank", True, True, 6.0, "Shifted Rotated Griewank"),
    FunctionDef(19, "levy", True, False, 0.1, "Shifted Levy"),
    FunctionDef(20, "levy", True, True, 0.1, "Shifted Rotated Levy"),
    FunctionDef(21, "penalized_1", True, False, 0.5, "Shifted Penalized 1"),
    FunctionDef(22, "penalized_1", True, True, 0.5, "Shifted Rotated Penalized 1"),
    FunctionDef(23, "penalized_2", True, False, 0.5, "Shifted Penalized 2"),
    FunctionDef(24, "penalized_2", True, True, 0.5, "Shifted Rotated Penalized 2"),
)

_DEFS_BY_ID = {d.id: d for d in FUNCTION_TABLE}


def parse_func_id(func_id):
    """Accept 7, '7' or 'f7'; returns the integer id."""
    if isinstance(func_id, str):
        text = func_id.strip().lower()
        if text.startswith("f"):
            text = text[1:]
        try:
            func_id = int(text)
        except ValueError:
            raise FormatError(f"not a function id: {func_id!r}") from None
    if func_id not in _DEFS_BY_ID:
        raise FormatError(f"function id out of range: {func_id!r}")
    return int(func_id)


@dataclass(eq=False)
class TransformData:
    """Shift, rotation, and scale bound to one benchmark instance."""

    shift: np.ndarray
    rotation: np.ndarray
    scale: float
    seed: int


@dataclass(eq=False)
class BenchmarkInstance:
    func_id: int
    base: str
    transform: TransformData
    dimension: int
    lower: np.ndarray
    upper: np.ndarray

    @property
    def label(self):
        return f"f{self.func_id}"

    @property
    def name(self):
        return _DEFS_BY_ID[self.func_id].name

    @property
    def shifted(self):
        return _DEFS_BY_ID[self.func_id].shifted

    @property
    def rotated(self):
        return _DEFS_BY_ID[self.func_id].rotated


def _random_orthogonal(dim, rng):
    # QR of a Gaussian matrix with the sign fix that makes Q Haar-distributed
    # and the factorization unique.
    gauss = rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(gauss)
    return q * np.sign(np.diag(r))


def generate_transform(base_seed, func_id, dim):
    """Deterministic transform data for (base_seed, function, dimension)."""
    func_id = parse_func_id(func_id)
    fdef = _DEFS_BY_ID[func_id]
    rng = np.random.default_rng([int(base_seed), func_id, int(dim)])
    if fdef.shifted:
        shift = rng.uniform(-SHIFT_ENVELOPE, SHIFT_ENVELOPE, dim)
    else:
        shift = np.zeros(dim)
    if fdef.rotated:
        rotation = _random_orthogonal(dim, rng)
    else:
        rotation = np.eye(dim)
    return TransformData(shift=shift, rotation=rotation, scale=fdef.scale,
                         seed=int(base_seed))


def make_instance(func_id, dim, transform_seed=DEFAULT_TRANSFORM_SEED,
                  transform=None):
    """Build one benchmark instance; transform data is generated unless given."""
    func_id = parse_func_id(func_id)
    fdef = _DEFS_BY_ID[func_id]
    if transform is None:
        transform = generate_transform(transform_seed, func_id, dim)
    if transform.shift.shape != (dim,):
        raise DimensionMismatch(
            f"shift has length {transform.shift.shape[0]}, expected {dim}"
        )
    if transform.rotation.shape != (dim, dim):
        raise DimensionMismatch(
            f"rotation is {transform.rotation.shape}, expected ({dim}, {dim})"
        )
    residual = np.max(np.abs(transform.rotation.T @ transform.rotation - np.eye(dim)))
    if residual > 1e-10:
        raise FormatError(f"rotation for f{func_id} is not orthogonal ({residual:.2e})")
    if transform.scale != fdef.scale:
        raise FormatError(
            f"f{func_id} requires scale {fdef.scale}, got {transform.scale}"
        )
    return BenchmarkInstance(
        func_id=func_id,
        base=fdef.base,
        transform=transform,
        dimension=dim,
        lower=np.full(dim, -DEFAULT_BOUND),
        upper=np.full(dim, DEFAULT_BOUND),
    )


def make_suite(dim, transform_seed=DEFAULT_TRANSFORM_SEED, ids=None):
    ids = range(1, 25) if ids is None else ids
    return [make_instance(i, dim, transform_seed) for i in ids]


def evaluate_benchmark(inst, x):
    """Apply the instance's transform and base formula at ``x`` (pure)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.dimension,):
        raise DimensionMismatch(
            f"point has shape {x.shape}, expected ({inst.dimension},)"
        )
    z = x - inst.transform.shift if inst.shifted else x
    if inst.rotated:
        z = inst.transform.rotation @ z
    if inst.transform.scale != 1.0:
        z = z * inst.transform.scale
    return _BASE_FUNCS[inst.base](z)


def optimal_point(inst):
    """The constructed global-optimum location (pre-image of the base optimum).

    For rotated instances this applies the transposed rotation, so the point
    may fall outside the search box for large base optima; the evaluation is
    still well-defined.
    """
    target = np.full(inst.dimension, _BASE_OPTIMUM.get(inst.base, 0.0))
    if inst.rotated:
        target = inst.transform.rotation.T @ target
    point = target / inst.transform.scale
    if inst.shifted:
        point = point + inst.transform.shift
    return point


def optimum_residual(inst):
    """Objective value at the constructed optimum; near zero when healthy."""
    return evaluate_benchmark(inst, optimal_point(inst))


def as_objective(inst):
    """Wrap an instance as the objective contract the reactor consumes."""
    return ObjectiveSpec(
        dimension=inst.dimension,
        lower=inst.lower,
        upper=inst.upper,
        evaluate=lambda x: evaluate_benchmark(inst, x),
    )


# ---------------------------------------------------------------------------
# persistence

def _canonical_lines(transform):
    lines = [" ".join(repr(float(v)) for v in transform.shift)]
    for row in transform.rotation:
        lines.append(" ".join(repr(float(v)) for v in row))
    return lines


def save_transform(path, func_id, transform):
    """Write transform data as plain text with a trailing CRC32 line."""
    func_id = parse_func_id(func_id)
    dim = transform.shift.shape[0]
    lines = _canonical_lines(transform)
    crc = zlib.crc32("\n".join(lines).encode("utf-8"))
    path = Path(path)
    path.write_text(
        f"f{func_id} {dim} {transform.seed}\n" + "\n".join(lines) + f"\n{crc}\n",
        encoding="utf-8",
    )
    return path


def load_transform(path):
    """Read a transform file back; returns (func_id, TransformData)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise FormatError(f"{path}: too short to be a transform file")
    header = lines[0].split()
    if len(header) != 3:
        raise FormatError(f"{path}: header must be 'id D seed'")
    func_id = parse_func_id(header[0])
    try:
        dim = int(header[1])
        seed = int(header[2])
    except ValueError as exc:
        raise FormatError(f"{path}: bad header: {exc}") from None
    if len(lines) != 1 + 1 + dim + 1:
        raise FormatError(
            f"{path}: expected {dim + 3} lines for D={dim}, found {len(lines)}"
        )
    payload = lines[1:-1]
    try:
        stated_crc = int(lines[-1])
    except ValueError:
        raise FormatError(f"{path}: checksum line is not an integer") from None
    try:
        shift = np.array([float(v) for v in payload[0].split()])
        rotation = np.array([[float(v) for v in row.split()] for row in payload[1:]])
    except ValueError as exc:
        raise FormatError(f"{path}: bad number: {exc}") from None
    if shift.shape != (dim,) or rotation.shape != (dim, dim):
        raise FormatError(f"{path}: payload shapes disagree with D={dim}")
    transform = TransformData(
        shift=shift, rotation=rotation, scale=_DEFS_BY_ID[func_id].scale, seed=seed
    )
    actual_crc = zlib.crc32("\n".join(_canonical_lines(transform)).encode("utf-8"))
    if actual_crc != stated_crc:
        raise ChecksumMismatch(f"{path}: crc {actual_crc} != stated {stated_crc}")
    return func_id, transform


def load_cec_shift(path, dim):
    """First ``dim`` numbers of a raw whitespace-separated shift file."""
    tokens = Path(path).read_text().split()
    if len(tokens) < dim:
        raise FormatError(f"{path}: found {len(tokens)} values, need {dim}")
    try:
        return np.array([float(t) for t in tokens[:dim]])
    except ValueError as exc:
        raise FormatError(f"{path}: bad number: {exc}") from None


def load_cec_rotation(path, dim):
    """First ``dim`` x ``dim`` numbers of a raw rotation file, row-major."""
    tokens = Path(path).read_text().split()
    if len(tokens) < dim * dim:
        raise FormatError(f"{path}: found {len(tokens)} values, need {dim * dim}")
    try:
        values = np.array([float(t) for t in tokens[: dim * dim]])
    except ValueError as exc:
        raise FormatError(f"{path}: bad number: {exc}") from None
    return values.reshape(dim, dim)


def instance_from_cec_dir(func_id, dim, data_dir):
    """Build an instance from raw files f{k}_shift.txt / f{k}_M.txt."""
    func_id = parse_func_id(func_id)
    fdef = _DEFS_BY_ID[func_id]
    data_dir = Path(data_dir)
    shift = np.zeros(dim)
    if fdef.shifted:
        shift = load_cec_shift(data_dir / f"f{func_id}_shift.txt", dim)
    rotation = np.eye(dim)
    if fdef.rotated:
        rotation = load_cec_rotation(data_dir / f"f{func_id}_M.txt", dim)
    transform = TransformData(shift=shift, rotation=rotation, scale=fdef.scale, seed=-1)
    return make_instance(func_id, dim, transform=transform)
