#!/usr/bin/env python3
# Copyright 2026 The usersim Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Reference values for the metric tests, computed with numpy/scipy/pandas.

The C++ tests read the JSON written here; nothing in this file shares code
with the library. Rerun after changing an input fixture:

    python3 tests/oracles/make_oracles.py
"""

import io
import json
import os
import re

import numpy as np
import pandas as pd
from scipy import stats

OUT = os.path.join(os.path.dirname(__file__), "..", "fixtures", "oracles")
N_INSTANCES = 1000


def tokenize(text):
    # Lowercase ASCII alphanumerics; bytes >= 0x80 are word characters.
    raw = text.encode("utf-8")
    return [t.decode("utf-8").lower() for t in re.split(rb"[^0-9A-Za-z\x80-\xff]+", raw) if t]


def entropy_bits(counts):
    return float(stats.entropy(np.asarray(counts, dtype=float), base=2))


def cosine_diversity(vectors):
    v = np.asarray(vectors, dtype=float)
    c = v.mean(axis=0)
    cos = v @ c / (np.linalg.norm(v, axis=1) * np.linalg.norm(c))
    return float(1.0 - cos.mean())


def metric_instances(rng):
    out = {"entropy": [], "pearson": [], "type_token_ratio": [], "cosine_diversity": [],
           "aspect_stats": []}
    for _ in range(N_INSTANCES):
        counts = rng.integers(1, 50, size=rng.integers(1, 12)).tolist()
        out["entropy"].append({"counts": counts, "expected": entropy_bits(counts)})

        n = int(rng.integers(3, 16))
        while True:
            x = rng.normal(0, rng.uniform(0.5, 10), n)
            y = 0.6 * x + rng.normal(0, rng.uniform(0.5, 10), n)
            if np.std(x) > 0 and np.std(y) > 0:
                break
        r, p = stats.pearsonr(x, y)
        out["pearson"].append({"x": x.tolist(), "y": y.tolist(), "r": float(r), "p": float(p)})

        vocab = [f"w{i}" for i in range(int(rng.integers(1, 20)))]
        tokens = [vocab[i] for i in rng.integers(0, len(vocab), size=rng.integers(1, 40))]
        out["type_token_ratio"].append({"tokens": tokens,
                                        "expected": len(set(tokens)) / len(tokens)})

        dim = int(rng.integers(2, 6))
        vs = rng.normal(0, 1, (int(rng.integers(2, 8)), dim))
        vs[:, 0] += rng.uniform(0, 2)  # keep the centroid away from zero
        out["cosine_diversity"].append({"vectors": vs.tolist(),
                                        "expected": cosine_diversity(vs)})

        aspects = ["cast", "plot", "music", "ending", "pacing", "visuals"]
        sentiments = ["positive", "negative", "neutral"]
        k = int(rng.integers(1, 15))
        pairs = [[aspects[rng.integers(0, len(aspects))], sentiments[rng.integers(0, 3)]]
                 for _ in range(k)]
        df = pd.DataFrame(pairs, columns=["aspect", "sentiment"])
        out["aspect_stats"].append({
            "pairs": pairs,
            "num_pairs": k,
            "num_aspects": int(df["aspect"].nunique()),
            "aspect_entropy": entropy_bits(df["aspect"].value_counts().tolist()),
            "sentiment_entropy": entropy_bits(df["sentiment"].value_counts().tolist()),
            "sentiment_counts": [int((df["sentiment"] == s).sum()) for s in sentiments],
        })
    return out


def pearson_20(rng):
    x = rng.uniform(0.5, 5.0, 20)
    y = 0.3 * x + rng.normal(0, 0.4, 20)
    r, p = stats.pearsonr(x, y)
    return {"x": x.tolist(), "y": y.tolist(), "r": float(r), "p": float(p)}


def constructed_preference(rng):
    # 50 movies, 20 half-star ratings each, averages spread over the scale.
    movies = []
    for i in range(50):
        centre = 0.75 + 4.0 * i / 49
        ratings = np.clip(np.round((centre + rng.normal(0, 0.6, 20)) * 2) / 2, 0.5, 5.0)
        movies.append({"key": f"movie {i:02d}|{1950 + i}", "display": f"Movie {i:02d} ({1950 + i})",
                       "ratings": ratings.tolist()})
    avg = np.array([np.mean(m["ratings"]) for m in movies])
    rate = (avg >= 3.0).astype(float)
    r, p = stats.pearsonr(avg, rate)
    liked = np.array([np.mean(np.array(m["ratings"]) >= 3.5) for m in movies])
    hr, hp = stats.pearsonr(avg, liked)
    return {"movies": movies, "r": float(r), "p": float(p), "human_r": float(hr),
            "human_p": float(hp)}


def movielens_10(rng):
    titles = ["Heat (1995)", "Matrix, The (1999)", "Up (2009)", "Jaws (1975)", "Drive (2011)",
              "Alien (1979)", "Her (2013)", "Moon (2009)", "Coco (2017)", "Rocky (1976)"]
    movies = "movieId,title,genres\n" + "".join(
        f'{i + 1},"{t}",Drama\n' for i, t in enumerate(titles))
    rows = []
    for i in range(10):
        for u in range(int(rng.integers(3, 12))):
            rows.append((u + 1, i + 1, float(rng.integers(1, 11)) / 2, 1000 + u))
    ratings = "userId,movieId,rating,timestamp\n" + "".join(
        f"{u},{m},{r},{t}\n" for u, m, r, t in rows)
    df = pd.read_csv(io.StringIO(ratings))
    g = df.groupby("movieId")["rating"]
    return {"movies_csv": movies, "ratings_csv": ratings,
            "mean": {titles[k - 1]: float(v) for k, v in g.mean().items()},
            "count": {titles[k - 1]: int(v) for k, v in g.count().items()},
            "liked": {titles[k - 1]: int(v) for k, v in
                      df.assign(l=df["rating"] >= 3.5).groupby("movieId")["l"].sum().items()}}


def histogram_50(rng):
    e = rng.uniform(1.0, 6.0, 50)
    counts, edges = np.histogram(e, bins=5)
    return {"entropies": e.tolist(), "counts": counts.tolist(), "edges": edges.tolist()}


WORDS = ("looking for a movie like with great acting and dark plot something light fun "
         "family horror slow thoughtful clever ending music please no any suggestions "
         "i loved it want need tonight weekend classic old new").split()


def corpus_30(rng):
    texts = []
    for i in range(30):
        n = int(rng.integers(4, 14))
        words = [WORDS[j] for j in rng.integers(0, len(WORDS), n)]
        texts.append(" ".join(words).capitalize() + ("?" if i % 3 == 0 else "."))
    vocab = sorted({t for text in texts for t in tokenize(text)})
    # Leave two words out of the table to exercise the out-of-vocabulary path.
    oov = vocab[:2]
    words = {w: rng.normal(0, 1, 6).tolist() for w in vocab if w not in oov}
    sentences = {t: (rng.normal(0, 1, 4) + np.array([1.5, 0, 0, 0])).tolist() for t in texts}

    tokens = [t for text in texts for t in tokenize(text)]
    word_vecs = [words[w] for w in vocab if w in words]
    sent_vecs = [sentences[t] for t in texts]
    ent = np.array([entropy_bits(pd.Series(tokenize(t)).value_counts().tolist()) for t in texts])
    counts, edges = np.histogram(ent, bins=5)
    idx = np.minimum(((ent - ent.min()) / ((ent.max() - ent.min()) / 5)).astype(int), 4)
    bins = []
    for b in range(5):
        members = [sent_vecs[i] for i in range(30) if idx[i] == b]
        bins.append({"requests": len(members),
                     "diversity": cosine_diversity(members) if len(members) >= 2 else None})
    return {"texts": texts, "word_vectors": words, "sentence_vectors": sentences,
            "tokens": len(tokens), "vocabulary": len(vocab), "out_of_vocabulary": len(oov),
            "type_token_ratio": len(set(tokens)) / len(tokens),
            "word_diversity": cosine_diversity(word_vecs),
            "sentence_diversity": cosine_diversity(sent_vecs),
            "mean_length": float(np.mean([len(t) for t in texts])),
            "histogram_counts": counts.tolist(), "bins": bins}


def main():
    os.makedirs(OUT, exist_ok=True)
    rng = np.random.default_rng(20240611)
    with open(os.path.join(OUT, "metric_instances.json"), "w") as f:
        json.dump(metric_instances(rng), f, separators=(",", ":"))
    spot = {
        "pearson_20": pearson_20(rng),
        "constructed_preference": constructed_preference(rng),
        "movielens_10": movielens_10(rng),
        "histogram_50": histogram_50(rng),
        "corpus_30": corpus_30(rng),
    }
    with open(os.path.join(OUT, "spot.json"), "w") as f:
        json.dump(spot, f, indent=1)


if __name__ == "__main__":
    main()
