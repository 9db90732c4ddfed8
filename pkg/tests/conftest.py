import numpy as np
from hypothesis import settings

from sedecomp import ReferencePair, Signal

settings.register_profile("suite", deadline=None, max_examples=60)
settings.load_profile("suite")

RATE = 16000


def sig(values, rate=RATE) -> Signal:
    return Signal(np.asarray(values, dtype=np.float64), rate)


def random_pair(rng, n, rate=RATE) -> ReferencePair:
    return ReferencePair(
        Signal(rng.standard_normal(n), rate), Signal(rng.standard_normal(n), rate)
    )


def random_instance(rng, n, rate=RATE):
    """A reference pair, an enhanced signal with a healthy artifact part,

    and the additive mixture y = s + n."""
    pair = random_pair(rng, n, rate)
    a, b = rng.uniform(-2.0, 2.0, size=2)
    c = rng.choice([-1.0, 1.0]) * rng.uniform(0.25, 2.0)
    shat = Signal(
        a * pair.speech.samples + b * pair.noise.samples + c * rng.standard_normal(n),
        rate,
    )
    y = Signal(pair.speech.samples + pair.noise.samples, rate)
    return pair, shat, y


def levenshtein_oracle(ref, hyp) -> int:
    """Independent top-down edit distance used as the WER oracle."""
    from functools import lru_cache

    ref = tuple(ref)
    hyp = tuple(hyp)

    @lru_cache(maxsize=None)
    def dist(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        sub = dist(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1])
        return min(sub, dist(i - 1, j) + 1, dist(i, j - 1) + 1)

    return dist(len(ref), len(hyp))
