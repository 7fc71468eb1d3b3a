#!/usr/bin/env python3
"""Reference implementation that writes the golden CSVs for the mini corpus.

Deliberately standalone: dense numpy matrices, no shared code with the
toolkit. The acceptance suite compares the CLI's output files against these
byte for byte.

    python3 scripts/golden_oracle.py fixtures/mini \
        fixtures/golden
"""
import json
import math
import sys
import unicodedata
from collections import Counter
from pathlib import Path

import numpy as np

REMOVED = {"\u00a0", "\u00ad"}
THRESHOLD_DIVISOR = 10_000_000
WINDOW = 2
ALPHA = 0.75
EXCLUSIONS = {"et"}
SOFT_HARD = {"b-p": ("b", "p"), "d-t": ("d", "t")}
QUERIES = ["televizyon", "yıl", "gerek"]
K = 10


def decade(year):
    start = year - year % 10
    return f"{start}-{start + 9}"


def normalize(raw):
    lines = []
    for line in raw.split("\n"):
        words, cur = [], []
        for ch in line:
            if ch.isspace():
                if cur:
                    words.append("".join(cur))
                    cur = []
            elif ch not in REMOVED:
                cur.append(ch)
        if cur:
            words.append("".join(cur))
        lines.append(" ".join(words))
    return "\n".join(lines)


def is_punct(ch):
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text):
    out = []
    for chunk in text.split():
        i = 0
        while i < len(chunk) and is_punct(chunk[i]):
            i += 1
        j = len(chunk)
        while j > i and is_punct(chunk[j - 1]):
            j -= 1
        out.extend(part for part in (chunk[:i], chunk[i:j], chunk[j:]) if part)
    return out


def lower_tr(s):
    return "".join("i" if c == "İ" else "ı" if c == "I" else c.lower() for c in s)


def lemma(surface, table):
    if surface in table:
        return table[surface]
    low = lower_tr(surface)
    return table.get(low, low[:5])


def vocabulary(tokens_per_doc, n_raw):
    counts = Counter(t for doc in tokens_per_doc for t in doc)
    threshold = -(-n_raw // THRESHOLD_DIVISOR)
    return {w: f for w, f in counts.items() if f >= threshold and w.isalpha()}


def vocab_tsv(period, vocab):
    lines = [f"#period={period} #tokens={sum(vocab.values())}"]
    lines += [f"{w}\t{f}" for w, f in sorted(vocab.items(), key=lambda x: (-x[1], x[0]))]
    return "\n".join(lines) + "\n"


def real(v):
    s = f"{v:.10f}"
    return s[1:] if s.startswith("-") and set(s[1:]) <= {"0", "."} else s


def matrix_csv(periods, fn):
    rows = ["period," + ",".join(periods)]
    for a in periods:
        rows.append(a + "," + ",".join(real(fn(a, b)) for b in periods))
    return "\n".join(rows) + "\n"


def jsd(p_counts, q_counts):
    tp, tq = sum(p_counts.values()), sum(q_counts.values())
    total = 0.0
    for w in sorted(set(p_counts) | set(q_counts)):
        p, q = p_counts.get(w, 0) / tp, q_counts.get(w, 0) / tq
        m = (p + q) / 2
        if p > 0:
            total += 0.5 * p * math.log2(p / m)
        if q > 0:
            total += 0.5 * q * math.log2(q / m)
    return max(total, 0.0)


def ortho_csv(periods, surface_vocab, cls):
    soft, hard = SOFT_HARD[cls]
    merged = Counter()
    for p in periods:
        merged.update(surface_vocab[p])
    pairs = []
    for w in merged:
        if len(w) > 1 and w.endswith(soft):
            other = w[:-1] + hard
            if other in merged and w not in EXCLUSIONS and other not in EXCLUSIONS:
                pairs.append((w, other))
    rows = ["period,class,soft_total,hard_total,ratio"]
    for p in periods:
        s = sum(surface_vocab[p].get(a, 0) for a, _ in pairs)
        h = sum(surface_vocab[p].get(b, 0) for _, b in pairs)
        rows.append(f"{p},{cls},{s},{h},{real(s / h) if h else ''}")
    return "\n".join(rows) + "\n"


def crossover_csv(periods, lemma_vocab, dictionary):
    rows = ["modern,old,crossover"]
    freq = {p: (lambda v, t: (lambda w: v.get(w, 0) / t))(lemma_vocab[p], sum(lemma_vocab[p].values())) for p in periods}
    for entry in dictionary:
        for old in entry["old"]:
            series = [(freq[p](entry["modern"]), freq[p](old)) for p in periods]
            found = ""
            for i, (m, o) in enumerate(series):
                if m > o and all(mm >= oo for mm, oo in series[i + 1:]):
                    found = periods[i]
                    break
            rows.append(f"{entry['modern']},{old},{found}")
    return "\n".join(rows) + "\n"


def svd_embedding(docs, vocab, dim):
    words = sorted(vocab)
    index = {w: i for i, w in enumerate(words)}
    n = len(words)
    counts = np.zeros((n, n))
    for doc in docs:
        for i, u in enumerate(doc):
            if u not in index:
                continue
            for j in range(max(0, i - WINDOW), min(len(doc), i + WINDOW + 1)):
                if j != i and doc[j] in index:
                    counts[index[u], index[doc[j]]] += 1
    total = counts.sum()
    p_uv = counts / total
    p_u = counts.sum(axis=1) / total
    smoothed = counts.sum(axis=0) ** ALPHA
    p_v = smoothed / smoothed.sum()
    with np.errstate(divide="ignore"):
        pmi = np.log(p_uv / np.outer(p_u, p_v))
    ppmi = np.where(counts > 0, np.maximum(pmi, 0.0), 0.0)
    u, s, _ = np.linalg.svd(ppmi)
    gap = s[dim - 1] - s[dim]
    assert gap > 1e-6, f"singular values {s[dim - 1]} / {s[dim]} too close to truncate"
    return words, u[:, :dim] * np.sqrt(s[:dim])


def aligned_neighbors(word, target, base, k):
    t_words, t_mat = target
    b_words, b_mat = base
    b_index = {w: i for i, w in enumerate(b_words)}
    shared = [w for w in t_words if w in b_index]
    a = t_mat[[t_words.index(w) for w in shared]]
    b = b_mat[[b_index[w] for w in shared]]
    u, _, vt = np.linalg.svd(a.T @ b)
    r = u @ vt
    v = t_mat[t_words.index(word)] @ r
    scores = b_mat @ v / (np.linalg.norm(b_mat, axis=1) * np.linalg.norm(v))
    ranked = sorted(zip(b_words, scores), key=lambda x: (-x[1], x[0]))[:k]
    rows = ["rank,lemma,cosine"]
    for i, (w, c) in enumerate(ranked, 1):
        s = f"{c:.6f}"
        rows.append(f"{i},{w},{s[1:] if s == '-0.000000' else s}")
    return "\n".join(rows) + "\n"


def main(fixture, out):
    fixture, out = Path(fixture), Path(out)
    out.mkdir(parents=True, exist_ok=True)
    config = json.loads((fixture / "diachron.json").read_text(encoding="utf-8"))
    dim = config["embedding"]["dim"]
    table = dict(
        line.split("\t") for line in (fixture / config["analyzer"]).read_text(encoding="utf-8").splitlines() if line
    )
    manifest = json.loads((fixture / "manifest.json").read_text(encoding="utf-8"))
    lemmas, surfaces, raw = {}, {}, Counter()
    for rec in sorted(manifest, key=lambda r: (r["date"], r["id"])):
        period = decade(int(rec["date"][:4]))
        toks = tokenize(normalize((fixture / rec["path"]).read_text(encoding="utf-8")))
        lemmas.setdefault(period, []).append([lemma(t, table) for t in toks])
        surfaces.setdefault(period, []).append([lower_tr(t) for t in toks])
        raw[period] += len(toks)
    periods = sorted(lemmas)
    lemma_vocab = {p: vocabulary(lemmas[p], raw[p]) for p in periods}
    surface_vocab = {p: vocabulary(surfaces[p], raw[p]) for p in periods}

    files = {}
    for p in periods:
        files[f"vocabulary_{p}.tsv"] = vocab_tsv(p, lemma_vocab[p])
        files[f"surface_vocabulary_{p}.tsv"] = vocab_tsv(p, surface_vocab[p])
    files["divergence_jaccard.csv"] = matrix_csv(
        periods,
        lambda a, b: len(lemma_vocab[a].keys() & lemma_vocab[b].keys()) / len(lemma_vocab[a].keys() | lemma_vocab[b].keys()),
    )
    files["divergence_jsd.csv"] = matrix_csv(periods, lambda a, b: jsd(lemma_vocab[a], lemma_vocab[b]))
    files["ortho_bp.csv"] = ortho_csv(periods, surface_vocab, "b-p")
    files["ortho_dt.csv"] = ortho_csv(periods, surface_vocab, "d-t")
    dictionary = json.loads((Path(__file__).parent.parent / "crates/core/data/sample_dictionary.json").read_text(encoding="utf-8"))
    files["dict_crossover.csv"] = crossover_csv(periods, lemma_vocab, dictionary)
    emb = {p: svd_embedding(lemmas[p], lemma_vocab[p], dim) for p in periods}
    first, last = periods[0], periods[-1]
    for w in QUERIES:
        files[f"aligned_{w}_svd_{last}_to_{first}.csv"] = aligned_neighbors(w, emb[last], emb[first], K)
    base = lemma_vocab[first]
    files[f"survived_{first}.csv"] = "period,survived\n" + "".join(
        f"{p},{len(base.keys() & lemma_vocab[p].keys())}\n" for p in periods
    )
    rows = ["period,unique_words,average_word_length,ngrams_2"]
    for p in periods:
        v = lemma_vocab[p]
        bigrams = sum(1 for d in lemmas[p] for x, y in zip(d, d[1:]) if x in v and y in v)
        rows.append(f"{p},{len(v)},{real(sum(len(w) for w in v) / len(v))},{bigrams}")
    files["vocab_metrics.csv"] = "\n".join(rows) + "\n"
    noisy = next(r for r in manifest if "\t" in (fixture / r["path"]).read_text(encoding="utf-8"))
    files[f"normalized_{noisy['id']}.txt"] = normalize((fixture / noisy["path"]).read_text(encoding="utf-8"))
    for name, content in files.items():
        (out / name).write_text(content, encoding="utf-8")
        print(name)


if __name__ == "__main__":
    main(*(sys.argv[1:3] if len(sys.argv) > 2 else ("fixtures/mini", "fixtures/golden")))
