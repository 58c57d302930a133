"""Topic modeling by collapsed Gibbs sampling.

Sampling runs over plain Python count lists in a fixed document/token order
with a single seeded RNG, so a fixed (corpus, K, alpha, beta, iterations,
seed) tuple reproduces the model bit for bit.  phi and theta are estimated
from the final sample with the usual smoothed count formulas.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyCorpus, InvalidK


@dataclass
class TopicModel:
    K: int
    phi: np.ndarray    # K x V topic-term distributions
    theta: np.ndarray  # D x K document-topic distributions
    vocabulary: dict[str, int]
    assignments: list[list[int]]
    alpha: float
    beta: float
    seed: int

    def terms(self) -> list[str]:
        inverse = [""] * len(self.vocabulary)
        for term, idx in self.vocabulary.items():
            inverse[idx] = term
        return inverse


def lda_fit(docs, K: int, alpha: float | None = None, beta: float = 0.01,
            iterations: int = 500, seed: int = 0) -> TopicModel:
    docs = [list(d) for d in docs]
    if K < 1:
        raise InvalidK(f"topic count must be >= 1, got {K}")
    if not docs:
        raise EmptyCorpus("no documents to model")
    for i, doc in enumerate(docs):
        if not doc:
            raise EmptyCorpus(f"document {i} is empty after tokenization")
    if iterations < 1:
        raise InvalidK(f"iterations must be >= 1, got {iterations}")
    if alpha is None:
        alpha = 50.0 / K

    vocabulary: dict[str, int] = {}
    token_ids: list[list[int]] = []
    for doc in docs:
        ids = []
        for tok in doc:
            if tok not in vocabulary:
                vocabulary[tok] = len(vocabulary)
            ids.append(vocabulary[tok])
        token_ids.append(ids)
    V = len(vocabulary)
    D = len(docs)

    rng = random.Random(seed)
    n_dk = [[0] * K for _ in range(D)]
    n_kt = [[0] * V for _ in range(K)]
    n_k = [0] * K
    z: list[list[int]] = []
    for d, ids in enumerate(token_ids):
        zs = []
        for t in ids:
            k = rng.randrange(K)
            zs.append(k)
            n_dk[d][k] += 1
            n_kt[k][t] += 1
            n_k[k] += 1
        z.append(zs)

    v_beta = V * beta
    probs = [0.0] * K
    for _ in range(iterations):
        for d, ids in enumerate(token_ids):
            zs = z[d]
            row = n_dk[d]
            for i, t in enumerate(ids):
                k = zs[i]
                row[k] -= 1
                n_kt[k][t] -= 1
                n_k[k] -= 1
                total = 0.0
                for j in range(K):
                    p = (row[j] + alpha) * (n_kt[j][t] + beta) / (n_k[j] + v_beta)
                    total += p
                    probs[j] = total
                pick = rng.random() * total
                k = 0
                while probs[k] < pick:
                    k += 1
                zs[i] = k
                row[k] += 1
                n_kt[k][t] += 1
                n_k[k] += 1

    phi = np.empty((K, V))
    for k in range(K):
        denom = n_k[k] + v_beta
        row = n_kt[k]
        for t in range(V):
            phi[k, t] = (row[t] + beta) / denom
    theta = np.empty((D, K))
    for d in range(D):
        denom = len(token_ids[d]) + K * alpha
        for k in range(K):
            theta[d, k] = (n_dk[d][k] + alpha) / denom
    return TopicModel(K, phi, theta, vocabulary, z, alpha, beta, seed)


def topic_outputs(model: TopicModel, top_terms: int = 10, top_docs: int = 10):
    """The three visualizer outputs: top terms per topic, top contributing
    documents per topic, and the topic correlation matrix over theta."""
    if top_terms < 1 or top_docs < 1:
        raise InvalidK("top_terms and top_docs must be >= 1")
    terms = model.terms()
    per_topic_terms = []
    for k in range(model.K):
        order = sorted(range(len(terms)), key=lambda t: (-model.phi[k, t], terms[t]))
        per_topic_terms.append([(terms[t], float(model.phi[k, t]))
                                for t in order[:top_terms]])
    per_topic_docs = []
    D = model.theta.shape[0]
    for k in range(model.K):
        order = sorted(range(D), key=lambda d: (-model.theta[d, k], d))
        per_topic_docs.append([(d, float(model.theta[d, k])) for d in order[:top_docs]])
    return per_topic_terms, per_topic_docs, topic_correlation(model)


def topic_correlation(model: TopicModel) -> np.ndarray:
    """Pearson correlation of theta columns across documents; zero-variance
    columns correlate 0 with everything (1 on the diagonal)."""
    K = model.K
    corr = np.eye(K)
    theta = model.theta
    for i in range(K):
        for j in range(i + 1, K):
            xi, xj = theta[:, i], theta[:, j]
            si, sj = float(xi.std()), float(xj.std())
            if si == 0.0 or sj == 0.0:
                c = 0.0
            else:
                c = float(((xi - xi.mean()) * (xj - xj.mean())).mean() / (si * sj))
            corr[i, j] = corr[j, i] = c
    return corr


def topic_divergence(model: TopicModel) -> np.ndarray:
    """Jensen-Shannon divergence between topic-term rows, the distributional
    reading of inter-topic similarity."""
    K = model.K
    out = np.zeros((K, K))
    for i in range(K):
        for j in range(i + 1, K):
            d = _jensen_shannon(model.phi[i], model.phi[j])
            out[i, j] = out[j, i] = d
    return out


def _jensen_shannon(p, q) -> float:
    m = 0.5 * (p + q)
    return 0.5 * _kl(p, m) + 0.5 * _kl(q, m)


def _kl(p, q) -> float:
    total = 0.0
    for pi, qi in zip(p, q):
        if pi > 0.0:
            total += pi * math.log(pi / qi)
    return total
