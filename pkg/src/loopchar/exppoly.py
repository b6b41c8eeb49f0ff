"""Exp-polynomial functions Z^n -> Q(zeta_N) and the decomposition machinery.

A function here is a finite sum of terms (polynomial in m) * (a_1^m_1 ... a_n^m_n)
with nonzero bases a_i.  Terms with distinct base tuples are linearly
independent, so merging equal bases gives a canonical form that is unique for
the underlying function; all symbolic reasoning below (lattice detection,
twist orbits, annihilator roots) leans on that uniqueness.

Numeric sampling backs every symbolic claim.  For checks that certify an
identity, the sample window is widened per axis to at least
deg(P_i) + maxdeg_i + 1 points: a one-variable exp-polynomial whose per-base
polynomial degrees are bounded by those of the data cannot vanish on that many
consecutive integers without vanishing identically, so a clean sweep of the
window is a proof, not a spot check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dataclass_field
from math import comb, lcm, prod

from .errors import ConductorTooSmall, OrbitInconsistency, ParseError
from .scalars import CycScalar, CyclotomicField, canonical_key


@dataclass
class CheckResult:
    """Outcome of a verification pass; truthy iff the check succeeded."""

    ok: bool
    witness: tuple | None = None
    detail: str = ""

    def __bool__(self):
        return self.ok


class ExpTerm:
    """One summand: a polynomial in m times a fixed exponential base tuple."""

    __slots__ = ("base", "poly")

    def __init__(self, base, poly):
        base = tuple(base)
        if any(not b for b in base):
            raise ValueError("exp-polynomial bases must be nonzero")
        clean = {}
        for exps, coeff in poly.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != len(base):
                raise ValueError("exponent vector length does not match the base")
            if any(e < 0 for e in exps):
                raise ValueError("polynomial exponents must be nonnegative")
            if coeff:
                clean[exps] = coeff
        self.base = base
        self.poly = clean

    @property
    def n(self) -> int:
        return len(self.base)

    def is_zero(self) -> bool:
        return not self.poly

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.poly), default=0)

    def poly_eval(self, m) -> CycScalar:
        acc = self.base[0].field.zero
        for exps, coeff in self.poly.items():
            w = 1
            for mi, ei in zip(m, exps):
                if ei:
                    w *= mi ** ei
            if w:
                acc = acc + coeff * w
        return acc

    def eval(self, m) -> CycScalar:
        v = self.poly_eval(m)
        for b, mi in zip(self.base, m):
            if mi:
                v = v * b ** mi
        return v

    def sort_key(self):
        return tuple(canonical_key(b) for b in self.base)

    def __eq__(self, other):
        return (isinstance(other, ExpTerm) and other.base == self.base
                and other.poly == self.poly)

    def __repr__(self):
        mono = " + ".join(
            f"{c}*m^{list(e)}" for e, c in sorted(self.poly.items()))
        return f"ExpTerm(base=({', '.join(map(str, self.base))}), poly={mono})"


class ExpPoly:
    """Canonical-form exp-polynomial: terms with pairwise distinct bases,
    sorted by the scalar order for reproducibility."""

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: CyclotomicField, n: int, terms=()):
        self.field = field
        self.n = n
        self.terms = tuple(terms)

    @classmethod
    def normalize(cls, field: CyclotomicField, n: int, raw_terms) -> "ExpPoly":
        """Merge equal bases, drop zero terms, sort: the unique canonical form."""
        merged: dict[tuple, dict] = {}
        for t in raw_terms:
            if t.n != n:
                raise ValueError(f"term arity {t.n} does not match n={n}")
            poly = merged.setdefault(t.base, {})
            for exps, coeff in t.poly.items():
                s = poly.get(exps)
                s = coeff if s is None else s + coeff
                if s:
                    poly[exps] = s
                elif exps in poly:
                    del poly[exps]
        terms = [ExpTerm(b, p) for b, p in merged.items() if p]
        terms.sort(key=ExpTerm.sort_key)
        return cls(field, n, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def eval(self, m) -> CycScalar:
        acc = self.field.zero
        for t in self.terms:
            acc = acc + t.eval(m)
        return acc

    def scaled(self, factor) -> "ExpPoly":
        return ExpPoly.normalize(
            self.field, self.n,
            [ExpTerm(t.base, {e: factor * c for e, c in t.poly.items()})
             for t in self.terms])

    def max_degree_in(self, i: int) -> int:
        return max((t.degree_in(i) for t in self.terms), default=0)

    def axis_bases(self, i: int) -> set[CycScalar]:
        return {t.base[i] for t in self.terms}

    def __eq__(self, other):
        return (isinstance(other, ExpPoly) and other.n == self.n
                and other.terms == self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"ExpPoly(n={self.n}, {len(self.terms)} terms)"


class PsiSpec:
    """A highest-weight datum: one exp-polynomial per Cartan generator label,
    plus optional constant weights that are stored but never computed with."""

    __slots__ = ("field", "n", "generators", "functions", "constants")

    def __init__(self, field, n, generators, functions, constants=None):
        generators = tuple(generators)
        if len(set(generators)) != len(generators):
            raise ParseError("generator labels must be distinct")
        if set(functions) != set(generators):
            raise ParseError("generator labels and function table disagree")
        for label, fn in functions.items():
            if fn.n != n:
                raise ParseError(f"generator {label}: arity {fn.n} does not match n={n}")
        if all(fn.is_zero() for fn in functions.values()):
            raise ParseError(
                "all generator functions vanish: the datum is trivial and its "
                "module is one dimensional")
        self.field = field
        self.n = n
        self.generators = generators
        self.functions = dict(functions)
        self.constants = dict(constants or {})


@dataclass(frozen=True)
class SupportLattice:
    """The diagonal lattice r_1 Z + ... + r_n Z off which the datum vanishes."""

    r: tuple[int, ...]

    @property
    def R(self) -> int:
        return prod(self.r)

    def gamma_bar(self) -> list[tuple[int, ...]]:
        """All twist indices (k_1, ..., k_n), k_i in 0..r_i-1."""
        return list(itertools.product(*(range(ri) for ri in self.r)))

    def ideal_indices(self) -> list[tuple[int, ...]]:
        """All annihilator-factor indices (j_1, ..., j_n), j_i in 1..r_i."""
        return list(itertools.product(*(range(1, ri + 1) for ri in self.r)))


@dataclass
class OrbitFactor:
    """One twist-orbit factor of an annihilator polynomial."""

    roots: list[tuple[CycScalar, int]]
    coeffs: list[CycScalar]

    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass
class AnnihilatorData:
    """Per-variable monic annihilator polynomials and their root data."""

    field: CyclotomicField
    n: int
    roots: list[list[tuple[CycScalar, int]]]
    polys: list[list[CycScalar]]

    def degree(self, i: int) -> int:
        return len(self.polys[i]) - 1


# -- small polynomial helpers over CycScalar --------------------------------

def _poly_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = out[i + j] + ai * bj
    return out


def _poly_from_roots(field, roots) -> list[CycScalar]:
    poly = [field.one]
    for root, mult in roots:
        lin = [-root, field.one]
        for _ in range(mult):
            poly = _poly_mul(poly, lin, field.zero)
    return poly


# -- grid evaluation ---------------------------------------------------------

def _axis_powers(base: CycScalar, points) -> dict[int, CycScalar]:
    points = sorted(points)
    out = {}
    cur = base ** points[0]
    prev = points[0]
    out[prev] = cur
    for m in points[1:]:
        for _ in range(m - prev):
            cur = cur * base
        out[m] = cur
        prev = m
    return out


def eval_on_grid(f: ExpPoly, axes) -> dict[tuple[int, ...], CycScalar]:
    """Evaluate f at every point of a product grid; one pass per term with
    cached per-axis powers of the bases."""
    axes = [sorted(ax) for ax in axes]
    points = list(itertools.product(*axes))
    zero = f.field.zero
    acc = dict.fromkeys(points, zero)
    for t in f.terms:
        pows = [_axis_powers(t.base[i], axes[i]) for i in range(f.n)]
        for m in points:
            v = pows[0][m[0]]
            for i in range(1, f.n):
                v = v * pows[i][m[i]]
            p = t.poly_eval(m)
            if p:
                acc[m] = acc[m] + v * p
    return acc


def _find_nonzero(f: ExpPoly, axes) -> tuple[int, ...] | None:
    grid = eval_on_grid(f, axes)
    for m in sorted(grid, key=lambda p: (max(abs(x) for x in p), p)):
        if grid[m]:
            return m
    return None


# -- support lattice ----------------------------------------------------------

def _twist_invariant(fn: ExpPoly, i: int, q: CycScalar) -> bool:
    table = {t.base: t.poly for t in fn.terms}
    for t in fn.terms:
        nb = t.base[:i] + (t.base[i] * q,) + t.base[i + 1:]
        poly = table.get(nb)
        if poly is None or poly != t.poly:
            return False
    return True


def support_lattice(spec: PsiSpec) -> SupportLattice:
    """Largest per-axis twist invariance of the term data: r_i is the biggest r
    such that multiplying every i-th base component by a fixed r-th root of
    unity permutes each generator's terms with identical polynomial parts.

    By root-of-unity orthogonality this is exactly the vanishing lattice: the
    datum is zero at every m with m_i not divisible by r_i.
    """
    field = spec.field
    cap = lcm(2, field.conductor)
    rs = []
    for i in range(spec.n):
        candidates: dict[int, CycScalar] = {}
        for fn in spec.functions.values():
            comps = sorted(fn.axis_bases(i), key=canonical_key)
            for a, b in itertools.combinations(comps, 2):
                q = b / a
                order = q.multiplicative_order(cap)
                if order and order > 1 and order not in candidates:
                    candidates[order] = q
        ri = 1
        for order in sorted(candidates, reverse=True):
            q = candidates[order]
            if all(_twist_invariant(fn, i, q) for fn in spec.functions.values()):
                ri = order
                break
        rs.append(ri)
    if any(field.conductor % ri for ri in rs):
        required = lcm(field.conductor, *rs)
        raise ConductorTooSmall(
            f"detected support lattice {tuple(rs)} but conductor "
            f"{field.conductor} does not contain the needed twist roots; "
            f"re-run with conductor {required}", required=required)
    return SupportLattice(tuple(rs))


# -- orbit extraction and twisting -------------------------------------------

def _zeta_power_table(field, r: int) -> list[CycScalar]:
    z = field.zeta(r)
    out = [field.one]
    for _ in range(r - 1):
        out.append(out[-1] * z)
    return out


def extract_phi(spec: PsiSpec, lat: SupportLattice) -> PsiSpec:
    """Keep one term per twist orbit of bases, choosing the representative with
    the minimal canonical key.  The result generates the datum: summing its
    twists over all of gamma_bar reproduces the input exactly."""
    field = spec.field
    zp = [_zeta_power_table(field, ri) for ri in lat.r]
    klist = lat.gamma_bar()
    new_functions = {}
    for label, fn in spec.functions.items():
        table = {t.base: t for t in fn.terms}
        claimed: set[tuple] = set()
        reps = []
        for t in fn.terms:
            if t.base in claimed:
                continue
            orbit = []
            for k in klist:
                nb = tuple(b * zp[i][k[i]] for i, b in enumerate(t.base))
                other = table.get(nb)
                if other is None:
                    raise OrbitInconsistency(
                        f"generator {label}: twist orbit of a base is incomplete "
                        f"(missing {tuple(str(x) for x in nb)})")
                if other.poly != t.poly:
                    raise OrbitInconsistency(
                        f"generator {label}: polynomial parts differ within a twist orbit")
                orbit.append(nb)
            rep = min(orbit, key=lambda b: tuple(canonical_key(x) for x in b))
            reps.append(ExpTerm(rep, t.poly))
            claimed.update(orbit)
        new_functions[label] = ExpPoly.normalize(field, spec.n, reps)
    return PsiSpec(field, spec.n, spec.generators, new_functions, spec.constants)


def twist(spec: PsiSpec, k, lat: SupportLattice) -> PsiSpec:
    """Multiply every i-th base component by zeta_{r_i}^{k_i}; polynomial
    parts are untouched.  twist(. , 0) is the identity and twists compose by
    adding indices mod r."""
    field = spec.field
    mults = tuple(field.zeta(lat.r[i], k[i] % lat.r[i]) for i in range(spec.n))
    new_functions = {}
    for label, fn in spec.functions.items():
        new_functions[label] = ExpPoly.normalize(
            field, spec.n,
            [ExpTerm(tuple(b * mults[i] for i, b in enumerate(t.base)), t.poly)
             for t in fn.terms])
    return PsiSpec(field, spec.n, spec.generators, new_functions, spec.constants)


def reconstruct_check(spec: PsiSpec, phi: PsiSpec, lat: SupportLattice,
                      box: int = 8) -> CheckResult:
    """Certify spec == sum of all twists of phi: termwise on canonical forms,
    then numerically on a sample grid."""
    field = spec.field
    twists = [twist(phi, k, lat) for k in lat.gamma_bar()]
    summed = {
        label: ExpPoly.normalize(
            field, spec.n,
            [t for tw in twists for t in tw.functions[label].terms])
        for label in spec.generators
    }
    termwise = all(summed[label] == spec.functions[label] for label in spec.generators)
    if not termwise:
        # canonical forms are unique, so the functions differ; locate a witness
        for label in spec.generators:
            residual = ExpPoly.normalize(
                field, spec.n,
                list(spec.functions[label].terms)
                + list(summed[label].scaled(-field.one).terms))
            if residual.is_zero():
                continue
            axes = _sound_axes(residual, box)
            m = _find_nonzero(residual, axes)
            return CheckResult(False, (label, m),
                               f"generator {label}: reconstruction differs at {m}")
        return CheckResult(False, None, "termwise mismatch with equal functions")
    axes = [range(-box, box + 1)] * spec.n
    for label in spec.generators:
        lhs = eval_on_grid(spec.functions[label], axes)
        rhs = eval_on_grid(summed[label], axes)
        for m in lhs:
            if lhs[m] != rhs[m]:
                return CheckResult(False, (label, m),
                                   f"generator {label}: evaluation differs at {m}")
    return CheckResult(True)


def _sound_axes(f: ExpPoly, box: int) -> list[range]:
    # enough consecutive points per axis to separate the term family
    axes = []
    for i in range(f.n):
        need = len(f.axis_bases(i)) * (f.max_degree_in(i) + 1)
        b = max(box, need // 2 + 1)
        axes.append(range(-b, b + 1))
    return axes


# -- annihilators -------------------------------------------------------------

def annihilator_polys(spec: PsiSpec) -> AnnihilatorData:
    """Monic per-variable polynomials annihilating every generator function
    under shifts: the roots are the occurring i-th base components, each with
    multiplicity one more than the largest i-th polynomial degree attached to
    it across all generators."""
    field = spec.field
    roots_per_var = []
    polys = []
    for i in range(spec.n):
        mults: dict[CycScalar, int] = {}
        for fn in spec.functions.values():
            for t in fn.terms:
                u = t.base[i]
                m = t.degree_in(i) + 1
                if mults.get(u, 0) < m:
                    mults[u] = m
        roots = sorted(mults.items(), key=lambda item: canonical_key(item[0]))
        roots_per_var.append(roots)
        polys.append(_poly_from_roots(field, roots))
    return AnnihilatorData(field, spec.n, roots_per_var, polys)


def _apply_recurrence(fn: ExpPoly, coeffs, i: int) -> ExpPoly:
    # symbolic image of f(m) -> sum_t c_t f(m + t e_i)
    raw = []
    for term in fn.terms:
        u = term.base[i]
        upow = term.base[0].field.one
        newpoly: dict[tuple, CycScalar] = {}
        for t, c in enumerate(coeffs):
            if t:
                upow = upow * u
            if not c:
                continue
            w = c * upow
            for exps, pc in term.poly.items():
                ei = exps[i]
                for s in range(ei + 1):
                    shifted = exps[:i] + (s,) + exps[i + 1:]
                    contrib = w * pc * (comb(ei, s) * t ** (ei - s))
                    if not contrib:
                        continue
                    cur = newpoly.get(shifted)
                    cur = contrib if cur is None else cur + contrib
                    if cur:
                        newpoly[shifted] = cur
                    elif shifted in newpoly:
                        del newpoly[shifted]
        if newpoly:
            raw.append(ExpTerm(term.base, newpoly))
    return ExpPoly.normalize(fn.field, fn.n, raw)


def relation_R_check(spec: PsiSpec, ann: AnnihilatorData, box: int = 8) -> CheckResult:
    """Verify that each annihilator polynomial kills every generator function:
    for all sampled m, sum_t c_{i,t} f(m + t e_i) == 0.

    The shifted sum is also formed symbolically; if it fails to cancel, the
    sample window is widened to the determining size so a witness point is
    guaranteed to surface.
    """
    field = spec.field
    for i in range(spec.n):
        coeffs = ann.polys[i]
        for label in spec.generators:
            residual = _apply_recurrence(spec.functions[label], coeffs, i)
            if residual.is_zero():
                continue
            axes = _sound_axes(residual, box)
            m = _find_nonzero(residual, axes)
            if m is None:
                # cannot happen for well-formed data; honor the sampled contract
                continue
            return CheckResult(
                False, (label, i, m),
                f"generator {label}, variable {i}: shifted sum is nonzero at {m}")
    # confirm numerically on the requested box
    degs = [ann.degree(i) for i in range(spec.n)]
    axes = [range(-box, box + max(degs) + 1) for _ in range(spec.n)]
    base_points = list(itertools.product(*[range(-box, box + 1)] * spec.n))
    for label in spec.generators:
        grid = eval_on_grid(spec.functions[label], axes)
        for i in range(spec.n):
            coeffs = ann.polys[i]
            for m in base_points:
                total = field.zero
                for t, c in enumerate(coeffs):
                    if c:
                        shifted = m[:i] + (m[i] + t,) + m[i + 1:]
                        total = total + c * grid[shifted]
                if total:
                    return CheckResult(
                        False, (label, i, m),
                        f"generator {label}, variable {i}: shifted sum is nonzero at {m}")
    return CheckResult(True)


def orbit_factorization(ann: AnnihilatorData, lat: SupportLattice
                        ) -> list[dict[int, OrbitFactor]]:
    """Split each annihilator polynomial into its twist-orbit factors
    P_{i,l}, l = 1..r_i.  Roots must come in complete orbits of size r_i with
    constant multiplicity; the stored orbit base is the root with the maximal
    canonical key."""
    field = ann.field
    tables = []
    for i in range(ann.n):
        ri = lat.r[i]
        zp = _zeta_power_table(field, ri)
        mults = dict(ann.roots[i])
        claimed: set[CycScalar] = set()
        orbit_reps = []
        for root, _ in sorted(ann.roots[i], key=lambda item: canonical_key(item[0]),
                              reverse=True):
            if root in claimed:
                continue
            members = [root * zp[ell % ri] for ell in range(1, ri + 1)]
            mult = mults[root]
            for u in members:
                if u not in mults:
                    raise OrbitInconsistency(
                        f"variable {i}: root orbit of {root} is incomplete at {u}")
                if mults[u] != mult:
                    raise OrbitInconsistency(
                        f"variable {i}: multiplicities differ inside the orbit of {root}")
            orbit_reps.append((root, mult))
            claimed.update(members)
        factors = {}
        for ell in range(1, ri + 1):
            roots = [(rep * zp[ell % ri], mult) for rep, mult in orbit_reps]
            factors[ell] = OrbitFactor(roots, _poly_from_roots(field, roots))
        product = [field.one]
        for f in factors.values():
            product = _poly_mul(product, f.coeffs, field.zero)
        if product != ann.polys[i]:
            raise OrbitInconsistency(
                f"variable {i}: orbit factors do not multiply back to the annihilator")
        tables.append(factors)
    return tables


def ideal_coprimality(factors: list[dict[int, OrbitFactor]], J, Jp) -> bool:
    """Whether the ideals generated by the J-th and J'-th factor tuples are
    co-prime: distinct indices and some variable whose two factors share no
    root."""
    J, Jp = tuple(J), tuple(Jp)
    if len(J) != len(factors) or len(Jp) != len(factors):
        raise ValueError("ideal index arity does not match the variable count")
    if J == Jp:
        return False
    for i, (a, b) in enumerate(zip(J, Jp)):
        if a == b:
            continue
        roots_a = {root for root, _ in factors[i][a].roots}
        roots_b = {root for root, _ in factors[i][b].roots}
        if not roots_a & roots_b:
            return True
    return False
