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
"""Writes the small synthetic raw datasets under data/sample/raw.

The records follow the raw formats in docs/data-formats.md and include a few
records each ingest filter should drop. Output is deterministic.
"""

import argparse
import csv
import json
import os
import random

MOVIES = [
    ("The Matrix", 1999), ("Inception", 2010), ("The Godfather", 1972),
    ("Pulp Fiction", 1994), ("Fight Club", 1999), ("Forrest Gump", 1994),
    ("The Dark Knight", 2008), ("Interstellar", 2014), ("Se7en", 1995),
    ("The Shawshank Redemption", 1994), ("Gladiator", 2000),
    ("The Silence of the Lambs", 1991), ("Alien", 1979), ("Heat", 1995),
    ("Amélie", 2001), ("Spirited Away", 2001), ("Parasite", 2019),
    ("Get Out", 2017), ("Arrival", 2016), ("Her", 2013), ("Drive", 2011),
    ("Zodiac", 2007), ("Memento", 2000), ("Oldboy", 2003), ("Up", 2009),
    ("Toy Story", 1995), ("Jaws", 1975), ("Rocky", 1976), ("Psycho", 1960),
    ("Vertigo", 1958), ("Casablanca", 1942), ("Goodfellas", 1990),
    ("Fargo", 1996), ("The Big Lebowski", 1998), ("No Country for Old Men", 2007),
    ("There Will Be Blood", 2007), ("The Social Network", 2010), ("Whiplash", 2014),
    ("La La Land", 2016), ("Moonlight", 2016), ("Mad Max: Fury Road", 2015),
    ("Blade Runner", 1982), ("Blade Runner 2049", 2017), ("The Thing", 1982),
    ("Hereditary", 2018), ("The Witch", 2015), ("It Follows", 2014),
    ("The Babadook", 2014), ("Sicario", 2015), ("Prisoners", 2013),
    ("Gone Girl", 2014), ("The Prestige", 2006), ("Shutter Island", 2010),
    ("The Departed", 2006), ("Jurassic Park", 1993), ("Back to the Future", 1985),
    ("The Truman Show", 1998), ("Eternal Sunshine of the Spotless Mind", 2004),
    ("Lost in Translation", 2003), ("Before Sunrise", 1995), ("Amadeus", 1984),
    ("The Lion King", 1994), ("Coco", 2017), ("Inside Out", 2015),
    ("The Grand Budapest Hotel", 2014), ("Knives Out", 2019), ("Dune", 2021),
    ("Soul", 2020), ("Tenet", 2020), ("Nomadland", 2020), ("Minari", 2020),
    ("Snowpiercer", 2013), ("The Host", 2006), ("Children of Men", 2006),
    ("District 9", 2009), ("Moon", 2009), ("Ex Machina", 2014),
    ("The Others", 2001), ("The Sixth Sense", 1999), ("Unbreakable", 2000),
]
LATE_MOVIE = ("Everything Everywhere All at Once", 2022)

ASPECTS = ["acting", "plot", "soundtrack", "ending", "pacing", "visuals",
           "dialogue", "characters", "cinematography", "direction"]
POSITIVE = ["was superb", "was brilliant", "kept me hooked", "was beautiful",
            "felt fresh", "was outstanding"]
NEGATIVE = ["was weak", "dragged badly", "felt flat", "was a mess",
            "was predictable", "fell apart"]
REQUEST_OPENERS = [
    "Looking for movies like {m}", "Any films similar to {m}?",
    "I just watched {m} and loved it", "Need something in the vein of {m}",
    "Suggest me a movie with the mood of {m}",
]
REQUEST_DETAILS = [
    "I like slow burning stories with a twist.",
    "Bonus points for a great soundtrack.",
    "Nothing too gory please, watching with my partner.",
    "I enjoy strong characters and clever dialogue.",
    "Something dark and atmospheric would be perfect.",
    "Prefer older films but open to anything.",
]


def label(m):
    return f"{m[0]} ({m[1]})"


def inverted(title):
    for art in ("The ", "A ", "An "):
        if title.startswith(art):
            return f"{title[len(art):]}, {art.strip()}"
    return title


def popular_choice(rng, pool, k):
    # Zipf-like weights so some titles dominate.
    weights = [1.0 / (i + 1) for i in range(len(pool))]
    out = []
    while len(out) < k:
        m = rng.choices(pool, weights)[0]
        if m not in out:
            out.append(m)
    return out


def redial(rng, path):
    lines = []
    for conv in range(60):
        k = rng.randint(2, 6) if conv % 15 else 0
        movies = popular_choice(rng, MOVIES, k)
        mentions = {}
        messages = []
        for i, m in enumerate(movies):
            mid = str(100000 + MOVIES.index(m))
            mentions[mid] = label(m)
            sender = 1 if i % 3 != 2 else 2  # some mentions come from the recommender
            messages.append({"senderWorkerId": sender, "text": f"Have you seen @{mid} ?"})
        messages.insert(0, {"senderWorkerId": 1, "text": "hi, I want a movie tonight"})
        if conv == 7:
            mentions["999999"] = label(LATE_MOVIE)
            messages.append({"senderWorkerId": 1, "text": "or @999999"})
        lines.append(json.dumps({"conversationId": str(20000 + conv), "initiatorWorkerId": 1,
                                 "respondentWorkerId": 2, "movieMentions": mentions,
                                 "messages": messages}))
    lines.insert(30, "{not json")
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def reddit(rng, path):
    lines = []
    for i in range(44):
        anchor = popular_choice(rng, MOVIES, 1)[0]
        title = rng.choice(REQUEST_OPENERS).format(m=anchor[0])
        body = " ".join(rng.sample(REQUEST_DETAILS, 2))
        created = 1420070400 + rng.randint(0, 6 * 365 * 86400)  # 2015..2020
        flair = "Movie"
        if i == 5:
            flair = "TV Show"
        if i == 9:
            created = 1656633600  # 2022-07-01
        comments = []
        for c in range(rng.randint(1, 3)):
            recs = popular_choice(rng, [m for m in MOVIES if m != anchor], rng.randint(1, 3))
            if i == 13:
                recs = []
            text = "Try " + " and ".join(label(m) for m in recs) + ". " if recs else "No idea, sorry."
            if recs:
                text += f"The {rng.choice(ASPECTS)} {rng.choice(POSITIVE)}."
            comments.append({"id": f"c{i}_{c}", "body": text, "movies": [label(m) for m in recs]})
        lines.append(json.dumps({"id": f"r{i:03d}", "created_utc": created, "title": title,
                                 "body": body, "flair": flair, "movies": [label(anchor)],
                                 "comments": comments}))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def review_text(rng):
    parts = []
    for a in rng.sample(ASPECTS, rng.randint(1, 3)):
        parts.append(f"The {a} {rng.choice(POSITIVE if rng.random() < 0.6 else NEGATIVE)}.")
    if rng.random() < 0.3:
        parts.append("Worth a watch on a rainy evening.")
    return " ".join(parts)


def imdb(rng, path):
    lines = []
    for u in range(10):
        n = 12 + u % 3 if u not in (3, 8) else 5
        movies = rng.sample(MOVIES, n)
        if u == 0:
            movies.append(LATE_MOVIE)
        for m in movies:
            lines.append(json.dumps({"user_id": f"ur{1000 + u}", "movie": label(m),
                                     "movie_id": f"tt{MOVIES.index(m) if m in MOVIES else 999:07d}",
                                     "review_title": "My take",
                                     "review": review_text(rng)}))
    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")


def movielens(rng, root):
    os.makedirs(root, exist_ok=True)
    quality = {m: rng.uniform(1.5, 4.8) for m in MOVIES}
    with open(os.path.join(root, "movies.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["movieId", "title", "genres"])
        for i, m in enumerate(MOVIES):
            w.writerow([i + 1, f"{inverted(m[0])} ({m[1]})", "Drama"])
        w.writerow([len(MOVIES) + 1, f"{LATE_MOVIE[0]} ({LATE_MOVIE[1]})", "Comedy"])
    with open(os.path.join(root, "ratings.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["userId", "movieId", "rating", "timestamp"])
        for i, m in enumerate(MOVIES):
            count = rng.randint(60, 120) if i < 25 else rng.randint(5, 40)
            for r in range(count):
                stars = min(5.0, max(0.5, round(rng.gauss(quality[m], 0.9) * 2) / 2))
                w.writerow([1 + (r * 7 + i) % 400, i + 1, stars, 1500000000 + r])
        w.writerow([1, len(MOVIES) + 1, 4.0, 1600000000])


def surnames(path):
    names = ["SMITH", "JOHNSON", "WILLIAMS", "BROWN", "JONES", "GARCIA", "MILLER", "DAVIS",
             "RODRIGUEZ", "MARTINEZ", "HERNANDEZ", "LOPEZ", "GONZALEZ", "WILSON", "ANDERSON",
             "THOMAS", "TAYLOR", "MOORE", "JACKSON", "MARTIN", "LEE", "NGUYEN", "KIM", "PATEL",
             "CHEN", "WANG", "LI", "ZHANG", "SINGH", "BEGAY", "YAZZIE", "WASHINGTON"]
    with open(path, "w") as f:
        f.write("surname\n" + "\n".join(names) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/sample")
    args = ap.parse_args()
    raw = os.path.join(args.out, "raw")
    os.makedirs(raw, exist_ok=True)
    rng = random.Random(20240601)
    redial(rng, os.path.join(raw, "redial.jsonl"))
    reddit(rng, os.path.join(raw, "reddit.jsonl"))
    imdb(rng, os.path.join(raw, "imdb.jsonl"))
    movielens(rng, os.path.join(raw, "movielens"))
    surnames(os.path.join(args.out, "surnames.csv"))


if __name__ == "__main__":
    main()
