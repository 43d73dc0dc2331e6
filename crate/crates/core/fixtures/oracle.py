#!/usr/bin/env python3
"""Recomputes the golden query tables for articles.jsonl.

Straight linear-scan reimplementation of the ingest rules, written without
reference to the Rust code paths. Run from this directory:

    python3 oracle.py

and compare with golden/*.csv.
"""

import json
import math
import unicodedata
from collections import Counter

AUTHOR_T, JOURNAL_T, TITLE_T = 0.75, 0.75, 0.90


def normalize(s):
    s = unicodedata.normalize("NFKC", unicodedata.normalize("NFKC", s).lower())
    s = "".join(c for c in s if unicodedata.category(c) != "Cc")
    s = "".join(c if c.isalnum() else " " for c in s)
    return " ".join(s.split())


def bigrams(s):
    out = Counter()
    for w in s.split():
        if len(w) == 1:
            out[w] += 1
        for i in range(len(w) - 1):
            out[w[i : i + 2]] += 1
    return out


def cos(a, b):
    ta, tb = bigrams(a), bigrams(b)
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    dot = sum(v * tb[k] for k, v in ta.items())
    na = math.sqrt(sum(v * v for v in ta.values()))
    nb = math.sqrt(sum(v * v for v in tb.values()))
    return min(1.0, dot / (na * nb))


class Graph:
    def __init__(self):
        self.nodes = []  # dicts with label + props
        self.rels = []  # (type, src, tgt)

    def node(self, label, **props):
        self.nodes.append(dict(label=label, **props))
        return len(self.nodes) - 1

    def rel(self, t, s, d):
        if (t, s, d) not in self.rels:
            self.rels.append((t, s, d))


def ingest(lines):
    g = Graph()
    journals, authors = [], []  # (name, id) in creation order
    exact = {}
    articles = []  # (id, title, journal id, record)

    def resolve(pool, name, label, thr):
        for n, i in pool:
            if cos(n, name) >= thr:
                return i
        i = g.node(label, name=name)
        pool.append((name, i))
        return i

    def named(label, name):
        key = (label, name)
        if key not in exact:
            exact[key] = g.node(label, name=name)
        return exact[key]

    for line in lines:
        r = json.loads(line)
        title = normalize(r["title"])
        j = resolve(journals, normalize(r["journal"]), "Journal", JOURNAL_T)
        if "snip" in r and "snip" not in g.nodes[j]:
            g.nodes[j]["snip"] = r["snip"]
        if r.get("journal_country"):
            c = named("Country", normalize(r["journal_country"]))
            g.nodes[j].setdefault("country", normalize(r["journal_country"]))
            if r.get("region"):
                g.rel("IN_REGION", c, named("Region", normalize(r["region"])))
        if any(jj == j and cos(t, title) >= TITLE_T for _, t, jj, _ in articles):
            continue
        a = g.node("Article", name=title, year=r["year"])
        if "totalcites" in r:
            g.nodes[a]["totalcites"] = r["totalcites"]
        articles.append((a, title, j, r))
        g.rel("PUBLISHED_IN", a, j)
        for au in r["authors"]:
            x = resolve(authors, normalize(au["name"]), "Author", AUTHOR_T)
            g.rel("AUTHORED", x, a)
            if au.get("institute"):
                inst = named("Institute", normalize(au["institute"]))
                g.rel("WORKS_FOR", x, inst)
                if au.get("country"):
                    g.rel("IS_IN", inst, named("Country", normalize(au["country"])))

    for a, _, _, r in articles:
        for cited in r.get("cited_titles", []):
            cited = normalize(cited)
            for b, t, _, _ in articles:
                if b != a and cos(t, cited) >= TITLE_T:
                    g.rel("CITES", a, b)
                    break

    def authors_of(a):
        return [s for t, s, d in g.rels if t == "AUTHORED" and d == a]

    def same_author(x, y):
        return x == y or cos(g.nodes[x]["name"], g.nodes[y]["name"]) >= AUTHOR_T

    for a, _, _, _ in articles:
        citers = [s for t, s, d in g.rels if t == "CITES" and d == a]
        own = authors_of(a)
        selfc = sum(
            1 for c in citers if any(same_author(x, y) for x in authors_of(c) for y in own)
        )
        g.nodes[a]["totalcites"] = max(g.nodes[a].get("totalcites", 0), len(citers))
        g.nodes[a]["selfcites"] = selfc
    return g


def csv(header, rows):
    return "".join(",".join(map(str, r)) + "\n" for r in [header] + rows)


def main():
    with open("articles.jsonl") as f:
        g = ingest([l for l in f if l.strip()])
    nodes, rels = g.nodes, g.rels

    wanted = {normalize(n) for n in ["Applied Soft Computing", "Neurocomputing", "Genetic Programming and Evolvable Machines"]}
    q1 = sorted(
        (j, a)
        for t, a, j in rels
        if t == "PUBLISHED_IN" and nodes[j]["name"] in wanted
    )
    q1 = [(nodes[a]["year"], nodes[j]["name"]) for j, a in q1]

    q2 = [
        (n["totalcites"], n["selfcites"]) for n in nodes if n["label"] == "Article"
    ]

    q3 = sorted(
        (au, i, c)
        for t1, au, i in rels
        if t1 == "WORKS_FOR"
        for t2, i2, c in rels
        if t2 == "IS_IN" and i2 == i
    )
    q3 = [(nodes[au]["name"], nodes[c]["name"]) for au, _, c in q3]

    outputs = {
        "golden/query1.csv": csv(["Article.year", "Journal.name"], q1),
        "golden/query2.csv": csv(["n.totalcites", "n.selfcites"], q2),
        "golden/query3.csv": csv(["Author.name", "Country.name"], q3),
    }
    for path, text in outputs.items():
        with open(path, "w") as f:
            f.write(text)
        print(f"== {path}\n{text}")


if __name__ == "__main__":
    main()
