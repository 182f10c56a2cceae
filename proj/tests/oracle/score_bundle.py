#!/usr/bin/env python3
"""Independent scorer for a run config: writes the cells.csv and
aggregates.json that the C++ pipeline is expected to produce byte-for-byte.

usage: score_bundle.py run.json out-dir     (paths in run.json relative to it)

Only what the mini-corpus needs: default extraction config, ASCII labels,
2019 semantics.
"""
import csv
import io
import json
import os
import sys
from collections import defaultdict

from rdflib import Graph, Literal, URIRef

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
LABEL = "http://www.w3.org/2000/01/rdf-schema#label"
ALT = "http://www.w3.org/2004/02/skos/core#altLabel"
CLASS_MARKERS = {"http://www.w3.org/2002/07/owl#Class",
                 "http://www.w3.org/2000/01/rdf-schema#Class"}
PROPERTY_MARKERS = {"http://www.w3.org/1999/02/22-rdf-syntax-ns#Property",
                    "http://www.w3.org/2002/07/owl#ObjectProperty",
                    "http://www.w3.org/2002/07/owl#DatatypeProperty",
                    "http://www.w3.org/2002/07/owl#AnnotationProperty"}
KINDS = ("class", "property", "instance")
ARITIES = ("1:1", "1:n", "n:1", "n:m")


def load(path):
    g = Graph()
    g.parse(path, format="nt")
    ents = defaultdict(lambda: {"labels": set(), "alt": set(), "cls": False, "prop": False})
    for s, p, o in g:
        e = ents[str(s)]
        if str(p) == RDF_TYPE and isinstance(o, URIRef):
            if str(o) in PROPERTY_MARKERS:
                e["prop"] = True
            elif str(o) in CLASS_MARKERS:
                e["cls"] = True
            else:
                ents[str(o)]["cls"] = True
        elif str(p) == LABEL and isinstance(o, Literal):
            e["labels"].add(str(o))
        elif str(p) == ALT and isinstance(o, Literal):
            e["alt"].add(str(o))
    out = {}
    for iri, e in ents.items():
        kind = "property" if e["prop"] else "class" if e["cls"] else "instance"
        labels = e["labels"] or {iri.rsplit("/", 1)[-1].rsplit("#", 1)[-1].replace("_", " ")}
        out[iri] = {"kind": kind, "labels": labels, "alt": e["alt"]}
    return out


def norm(label):
    return " ".join(label.replace("_", " ").lower().split())


def match(src, tgt, alt):
    def keys(e):
        ls = set(e["labels"]) | (e["alt"] if alt else set())
        return {norm(l) for l in ls} - {""}
    return {(s, t) for s, es in src.items() for t, et in tgt.items()
            if es["kind"] == et["kind"] and keys(es) & keys(et)}


def read_pairs(path):
    pairs = {}
    for line in open(path, encoding="utf-8"):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        f = line.split("\t")
        pairs[(f[0], f[1])] = float(f[3]) if len(f) > 3 else 1.0
    return pairs


def fmt(x):
    r = repr(x)
    return r[:-2] if r.endswith(".0") else r


def arity(pairs):
    outdeg, indeg = defaultdict(set), defaultdict(set)
    for s, t in pairs:
        outdeg[s].add(t)
        indeg[t].add(s)
    return {(s, t): ("n:m" if len(outdeg[s]) > 1 and len(indeg[t]) > 1 else
                     "1:n" if len(outdeg[s]) > 1 else
                     "n:1" if len(indeg[t]) > 1 else "1:1") for s, t in pairs}


def metrics(c):
    p = c["tp"] / (c["tp"] + c["fp"]) if c["tp"] + c["fp"] else 0.0
    r = c["tp"] / (c["tp"] + c["fn"]) if c["tp"] + c["fn"] else 0.0
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def main():
    config_path, out_dir = sys.argv[1], sys.argv[2]
    base = os.path.dirname(os.path.abspath(config_path))
    cfg = json.load(open(config_path))
    rel = lambda p: os.path.join(base, p)
    assert cfg.get("semantics", "2019") == "2019" and cfg.get("fp_side", "both") == "both"
    matchers = {"baselineAltLabel": True, "baselineLabel": False}
    external = {(a["matcher"], a["task"]): rel(a["file"]) for a in cfg.get("alignments", [])}
    names = sorted(set(matchers) | {m for m, _ in external})

    rows, summaries = [], []
    for task in cfg["tasks"]:
        src, tgt = load(rel(task["source"])), load(rel(task["target"]))
        gold = set(read_pairs(rel(task["gold"])))
        gsrc, gtgt = {s for s, _ in gold}, {t for _, t in gold}

        def kind(s, t):
            if s in src and t in tgt and src[s]["kind"] == tgt[t]["kind"]:
                return src[s]["kind"]
            return None

        def trivial(s, t):
            return s in src and t in tgt and bool(src[s]["labels"] & tgt[t]["labels"])

        for name in names:
            if name in matchers:
                produced = {p: 1.0 for p in match(src, tgt, matchers[name])}
            elif (name, task["id"]) in external:
                produced = read_pairs(external[(name, task["id"])])
            else:
                produced = {}
            ar = arity(produced)
            counts = {k: defaultdict(int) for k in KINDS + ("overall",)}
            sizes = defaultdict(int)
            for (s, t), conf in produced.items():
                outcome = ("TP" if (s, t) in gold else
                           "FP" if s in gsrc or t in gtgt else "IGNORED")
                k = kind(s, t)
                rows.append((name, task["id"], s, t, k or "mixed", outcome, trivial(s, t),
                             ar[(s, t)], fmt(conf)))
                key = {"TP": "tp", "FP": "fp", "IGNORED": "ignored"}[outcome]
                counts["overall"][key] += 1
                sizes["overall"] += 1
                if k:
                    counts[k][key] += 1
                    sizes[k] += 1
            for s, t in gold - set(produced):
                k = kind(s, t)
                rows.append((name, task["id"], s, t, k or "mixed", "FN", trivial(s, t), "", ""))
                counts["overall"]["fn"] += 1
                if k:
                    counts[k]["fn"] += 1
            summaries.append((name, task["id"], counts, sizes, not produced))

    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[5]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow("matcher,task,source,target,kind,outcome,trivial,arity,confidence".split(","))
    for r in rows:
        w.writerow(list(r[:6]) + ["true" if r[6] else "false"] + list(r[7:]))

    summaries.sort(key=lambda x: (x[0], x[1]))
    tasks_json, arity_json, matchers_json = [], [], {}
    for name, task, counts, sizes, empty in summaries:
        t = {"matcher": name, "task": task, "empty": empty}
        for k in KINDS + ("overall",):
            c = counts[k]
            p, r, f = metrics(c)
            t[k] = {"tp": c["tp"], "fp": c["fp"], "fn": c["fn"], "ignored": c["ignored"],
                    "Size": sizes[k], "Prec.": p, "Rec.": r, "F-m.": f}
        tasks_json.append(t)
        a = {"matcher": name, "task": task}
        for x in ARITIES:
            a[x] = sum(1 for row in rows
                       if row[0] == name and row[1] == task and row[7] == x)
        arity_json.append(a)
    for name in names:
        mine = [s for s in summaries if s[0] == name]
        m = {}
        for k in KINDS + ("overall",):
            done = [s for s in mine if not s[4]]
            per = [metrics(s[2][k])[:2] for s in done]
            entry = {"Size": (sum(s[3][k] for s in done) / len(done)) if done else 0.0}
            for variant, denom in (("global", len(mine)), ("completed", len(done))):
                p = sum(x[0] for x in per) / denom if denom else 0.0
                r = sum(x[1] for x in per) / denom if denom else 0.0
                entry[variant] = {"Prec.": p, "Rec.": r,
                                  "F-m.": 2 * p * r / (p + r) if p + r else 0.0}
            m[k] = entry
        m["# tasks"] = sum(1 for s in mine if not s[4])
        matchers_json[name] = m
    aggregates = {
        "aggregation": {"across_tasks": "macro", "within_task": "micro",
                        "f_measure": "harmonic mean of averaged precision and recall"},
        "arity": arity_json, "matchers": matchers_json, "tasks": tasks_json}

    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "cells.csv"), "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())
    with open(os.path.join(out_dir, "aggregates.json"), "w", encoding="utf-8") as f:
        f.write(json.dumps(aggregates, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
