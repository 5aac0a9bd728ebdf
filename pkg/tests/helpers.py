import json
import random
from fractions import Fraction
from pathlib import Path

from mahlermu.algebra import Polynomial
from mahlermu.errors import MahlerError
from mahlermu.series import MahlerEquation, expand_any, load_equation

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

# lines appended by the acceptance tests, printed in the session summary
CRITERIA_LOG = []


def poly(*coeffs) -> Polynomial:
    return Polynomial(list(coeffs))


def worked(a0, c1, c0) -> MahlerEquation:
    """(z + 1) f(z) = a0 f(z^3) + c1 z + c0."""
    return MahlerEquation(poly(a0), poly(1, 1), poly(c0, c1), 3)


WORKED_TRIPLES = [(1, 1, 1), (2, 1, -3), (1, 2, 1)]


def corpus_files():
    return sorted(CORPUS.glob("*.json"))


def load_corpus(name):
    return load_equation(CORPUS / f"{name}.json")


def corpus_series(name, n=64):
    ef = load_corpus(name)
    return ef.equation, expand_any(ef.equation, n, ef.seeds, ef.K)


def random_equation(rng: random.Random, d=None) -> MahlerEquation:
    d = d or rng.choice([2, 3])

    def r(n):
        return poly(*([rng.randint(-2, 2) for _ in range(n)] + [rng.choice([-2, -1, 1, 2])]))

    return MahlerEquation(r(rng.randint(0, 1)), r(rng.randint(1, 2)), r(rng.randint(0, 2)), d)


def random_series(rng: random.Random, count: int, n: int = 96, accept=None):
    """`count` (equation, series) pairs from random equations with a consistent K."""
    out = []
    while len(out) < count:
        eq = random_equation(rng)
        try:
            s = expand_any(eq, n)
        except MahlerError:
            continue
        if accept is None or accept(eq, s):
            out.append((eq, s))
    return out


def frac_list(items):
    return [Fraction(x) for x in items]


def read_json(path):
    return json.loads(Path(path).read_text())
