"""Character n-gram F-score"""

from sacrebleu.metrics.helpers import extract_all_char_ngrams

CHAR_ORDER = 6
BETA = 2.0


def chrf(candidate: str, reference: str, order: int = CHAR_ORDER, beta: float = BETA) -> float:
    """chrF on a 0-100 scale.

    Whitespace is removed before n-gram extraction. Per-order F-scores are
    averaged over the orders for which both strings have n-grams.
    """
    hyp = "".join((candidate or "").split())
    ref = "".join((reference or "").split())
    if not hyp and not ref:
        return 100.0
    if not hyp or not ref:
        return 0.0

    factor = beta ** 2
    scores = []
    hyp_orders = extract_all_char_ngrams(hyp, order, include_whitespace=False)
    ref_orders = extract_all_char_ngrams(ref, order, include_whitespace=False)
    for hyp_grams, ref_grams in zip(hyp_orders, ref_orders):
        if not hyp_grams or not ref_grams:
            continue
        matched = sum((hyp_grams & ref_grams).values())
        precision = matched / sum(hyp_grams.values())
        recall = matched / sum(ref_grams.values())
        if precision + recall == 0:
            scores.append(0.0)
        else:
            scores.append((1 + factor) * precision * recall / (factor * precision + recall))
    return 100.0 * sum(scores) / len(scores)


def chrf_similarity(candidate: str, reference: str) -> float:
    """chrF rescaled to [0, 1]; the default value scorer."""
    return chrf(candidate, reference) / 100.0
