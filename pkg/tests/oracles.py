"""Independent reference computations used by the tests."""

import math
import random


def occurrences(token_lists, seq):
    """Contiguous occurrences of ``seq`` inside single documents, by direct scan."""
    seq = tuple(seq)
    n = len(seq)
    return sum(
        1
        for toks in token_lists
        for i in range(len(toks) - n + 1)
        if tuple(toks[i:i + n]) == seq
    )


def brute_force_compounds(token_lists, vocabulary, threshold, max_len, base=10.0):
    """All contiguous subsequences whose every one-token extension step clears the MI threshold.

    Returns ``{tokens: (mi of the last step, support)}``.
    """
    vocabulary = set(vocabulary)
    total = sum(len(t) for t in token_lists)
    found = {}
    for toks in token_lists:
        for i in range(len(toks)):
            for length in range(2, max_len + 1):
                seq = tuple(toks[i:i + length])
                if len(seq) < length or not set(seq) <= vocabulary or seq in found:
                    continue
                ok = True
                last = None
                for k in range(1, length):
                    joint = occurrences(token_lists, seq[:k + 1])
                    left = occurrences(token_lists, seq[:k])
                    right = occurrences(token_lists, seq[k:k + 1])
                    last = math.log(joint * total / (left * right), base)
                    if not last > threshold:
                        ok = False
                        break
                if ok:
                    found[seq] = (last, occurrences(token_lists, seq))
    return found


def random_corpus(rng: random.Random, max_tokens=30, alphabet="abcdef"):
    docs = []
    budget = rng.randint(2, max_tokens)
    while budget > 0:
        n = min(budget, rng.randint(1, 8))
        docs.append([rng.choice(alphabet[: rng.randint(2, len(alphabet))]) for _ in range(n)])
        budget -= n
    return docs
