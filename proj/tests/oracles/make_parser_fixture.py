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
"""Writes the labeled item-list reply fixture.

Each reply lists which movies it names; the gold categories come from that
list and the hand-written keys below, never from the parser.
"""

import json
import os
import random

# (display title, year, gold key)
MOVIES = [
    ("The Matrix", 1999, "matrix (1999)"),
    ("Jerry Maguire", 1996, "jerry maguire (1996)"),
    ("Heat", 1995, "heat (1995)"),
    ("Crouching Tiger, Hidden Dragon", 2000, "crouching tiger hidden dragon (2000)"),
    ("Pride and Prejudice", 2005, "pride and prejudice (2005)"),
    ("The Silence of the Lambs", 1991, "silence of the lambs (1991)"),
    ("Mad Max: Fury Road", 2015, "mad max fury road (2015)"),
    ("Amélie", 2001, "amelie (2001)"),
    ("The Shawshank Redemption", 1994, "shawshank redemption (1994)"),
    ("Inception", 2010, "inception (2010)"),
    ("Spirited Away", 2001, "spirited away (2001)"),
    ("Eternal Sunshine of the Spotless Mind", 2004, "eternal sunshine of the spotless mind (2004)"),
    ("Back to the Future", 1985, "back to the future (1985)"),
    ("The Dark Knight", 2008, "dark knight (2008)"),
    ("Good Will Hunting", 1997, "good will hunting (1997)"),
    ("Little Miss Sunshine", 2006, "little miss sunshine (2006)"),
    ("Before Sunrise", 1995, "before sunrise (1995)"),
    ("Jurassic Park", 1993, "jurassic park (1993)"),
    ("The Princess Bride", 1987, "princess bride (1987)"),
    ("Pan's Labyrinth", 2006, "pans labyrinth (2006)"),
    ("No Country for Old Men", 2007, "no country for old men (2007)"),
    ("The Grand Budapest Hotel", 2014, "grand budapest hotel (2014)"),
    ("Toy Story", 1995, "toy story (1995)"),
    ("Casablanca", 1942, "casablanca (1942)"),
    ("Interstellar", 2014, "interstellar (2014)"),
    ("Whiplash", 2014, "whiplash (2014)"),
    ("Fargo", 1996, "fargo (1996)"),
    ("Gone Girl", 2014, "gone girl (2014)"),
    ("The Sixth Sense", 1999, "sixth sense (1999)"),
    ("Knives Out", 2019, "knives out (2019)"),
]
INVENTED = [
    ("The Midnight Harbor", 2003, "unmatched:midnight harbor (2003)"),
    ("Silver Lanterns", 2011, "unmatched:silver lanterns (2011)"),
    ("A Quiet Frontier", 1998, "unmatched:quiet frontier (1998)"),
]


def inverted(title):
    for art in ("The ", "A ", "An "):
        if title.startswith(art):
            return f"{title[len(art):]}, {art.strip()}"
    return title


def typo(title):
    # Drop one letter from the middle of a long title.
    i = len(title) // 2
    while not title[i].isalpha():
        i += 1
    return title[:i] + title[i + 1:]


def render(m, rng, variant):
    title, year, _ = m
    if variant == "inverted":
        title = inverted(title)
    elif variant == "lower":
        title = title.lower()
    elif variant == "typo" and len(title) >= 12:
        title = typo(title)
    elif variant == "bold":
        return f"**{title}** ({year})"
    elif variant == "quoted":
        return f'"{title}" ({year})'
    elif variant == "brackets":
        return f"{title} [{year}]"
    return f"{title} ({year})"


def item_list(rng, picks, style, variant_p):
    variants = ["plain"] * 6 + ["inverted", "lower", "typo", "bold", "quoted", "brackets"]
    parts = [render(m, rng, rng.choice(variants) if rng.random() < variant_p else "plain")
             for m in picks]
    if style == "numbered":
        return "\n".join(f"{i + 1}. {p}" for i, p in enumerate(parts))
    if style == "bullets":
        mark = rng.choice(["-", "*", "•"])
        return "\n".join(f"{mark} {p}" for p in parts)
    if style == "inline":
        if len(parts) == 1:
            return parts[0]
        return ", ".join(parts[:-1]) + ", and " + parts[-1]
    if style == "preamble":
        head = rng.choice(["Sure! Here are some movies:", "Here you go:",
                           "These are the movies I would talk about:"])
        return head + "\n" + "\n".join(f"{i + 1}) {p}" for i, p in enumerate(parts))
    if style == "prose":
        lead = [f"I'd love to talk about {parts[0]}!"]
        for p in parts[1:]:
            lead.append(rng.choice([f"Also {p} was great.", f"Then there is {p}.",
                                    f"And of course {p}."]))
        return " ".join(lead)
    raise ValueError(style)


def main():
    rng = random.Random(7)
    rows = []
    # Hand-picked cases first.
    rows.append({"reply": "I'd love to talk about Jerry Maguire (1996)!",
                 "gold": ["jerry maguire (1996)"]})
    rows.append({"reply": "Heat (1995), Crouching Tiger, Hidden Dragon (2000) and Pride and "
                          "Prejudice (2005)",
                 "gold": ["heat (1995)", "crouching tiger hidden dragon (2000)",
                          "pride and prejudice (2005)"]})
    rows.append({"reply": "1. Matrix, The (1999)\n2. the silence of the lambs (1991)\n"
                          "3. The Midnight Harbor (2003)",
                 "gold": ["matrix (1999)", "silence of the lambs (1991)",
                          "unmatched:midnight harbor (2003)"]})
    rows.append({"reply": "My favorites are The Matrix (1999) and Inception (2010).",
                 "gold": ["matrix (1999)", "inception (2010)"]})
    rows.append({"reply": "- Amélie (2001)\n- Spirited Away (2001)\n- Amélie (2001)",
                 "gold": ["amelie (2001)", "spirited away (2001)"]})
    # Prose around an unknown title: the sentence start sticks to the title.
    rows.append({"reply": "I would also mention Silver Lanterns (2011), a hidden gem.",
                 "gold": ["unmatched:silver lanterns (2011)"]})
    rows.append({"reply": "Honestly my pick is A Quiet Frontier (1998)",
                 "gold": ["unmatched:quiet frontier (1998)"]})
    styles = ["numbered", "bullets", "inline", "preamble", "prose"]
    while len(rows) < 100:
        k = rng.randint(1, 5)
        picks = rng.sample(MOVIES, k)
        if rng.random() < 0.15:
            picks[rng.randrange(k)] = rng.choice(INVENTED)
        style = rng.choice(styles)
        reply = item_list(rng, picks, style, 0.35 if style != "prose" else 0.0)
        gold = []
        for m in picks:
            if m[2] not in gold:
                gold.append(m[2])
        rows.append({"reply": reply, "gold": gold})
    out = os.path.join(os.path.dirname(__file__), "..", "fixtures")
    with open(os.path.join(out, "item_list_replies.jsonl"), "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    with open(os.path.join(out, "parser_catalog.txt"), "w") as f:
        for title, year, _ in MOVIES:
            f.write(f"{title} ({year})\n")


if __name__ == "__main__":
    main()
