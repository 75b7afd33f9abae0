#!/usr/bin/env python3
"""Regenerates the deterministic test fixtures under tests/data/."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"

SUBJECTS = ["the teacher", "my friend", "the students", "our neighbours", "the doctor",
            "his sister", "the children", "a tourist", "the manager", "many people",
            "the old man", "her parents", "the government", "this company", "my brother"]
VERBS = ["visited", "liked", "wanted", "described", "explained", "watched", "needed",
         "discussed", "finished", "opened", "closed", "changed", "helped", "reported"]
OBJECTS = ["the museum", "a new book", "the problem", "their house", "the results",
           "an interesting film", "the local market", "the situation", "a long letter",
           "the final exam", "the city centre", "the small garden", "the meeting"]
TAILS = ["yesterday", "last week", "in the morning", "after school", "every summer",
         "without any help", "because of the rain", "before the holidays", "with great care",
         "at the weekend", "during the break", "for several hours"]
FILLERS = ["very", "really", "the", "a", "so", "that", "of", "to"]
SWAP_WORDS = {"the": "a", "a": "the", "in": "on", "on": "at", "at": "in", "with": "by",
              "for": "to", "many": "much", "visited": "visits", "liked": "likes",
              "wanted": "wants", "people": "peoples", "children": "childs"}

HEALTY = ("I think the family will stay mentally healty as it is , without having emtional stress .",
          "I think the family will stay mentally healthy without having emotional stress .")


def clean_sentence(rng):
    words = f"{rng.choice(SUBJECTS)} {rng.choice(VERBS)} {rng.choice(OBJECTS)} {rng.choice(TAILS)}".split()
    if rng.random() < 0.4:
        words += ["and", rng.choice(VERBS)] + rng.choice(OBJECTS).split()
    words[0] = words[0].capitalize()
    return words + ["."]


def misspell(word, rng):
    if len(word) < 3 or not word.isalpha():
        return word + word[-1]
    i = rng.randrange(1, len(word) - 1)
    kind = rng.randrange(3)
    if kind == 0:
        return word[:i] + word[i + 1:]
    if kind == 1:
        return word[:i] + word[i] + word[i:]
    return word[:i - 1] + word[i] + word[i - 1] + word[i + 1:]


def corrupt(words, rng, n_errors):
    src = list(words)
    for _ in range(n_errors):
        kind = rng.randrange(6)
        i = rng.randrange(len(src))
        if kind == 0:
            src[i] = misspell(src[i], rng)
        elif kind == 1 and len(src) > 3:
            del src[i]
        elif kind == 2:
            src.insert(i, rng.choice(FILLERS))
        elif kind == 3 and src[i].lower() in SWAP_WORDS:
            src[i] = SWAP_WORDS[src[i].lower()]
        elif kind == 4:
            src[i] = src[i].lower() if src[i][0].isupper() else src[i].capitalize()
        elif i + 1 < len(src):
            src[i], src[i + 1] = src[i + 1], src[i]
    return src


def corpus(rng, n):
    lines = ["\t".join(HEALTY)]
    for k in range(n - 1):
        tgt = clean_sentence(rng)
        if k % 25 == 0:
            lines.append(" ".join(tgt) + "\t" + " ".join(tgt))
            continue
        src = corrupt(tgt, rng, rng.randint(1, 4))
        cols = [" ".join(src), " ".join(tgt)]
        if k % 7 == 0:
            partial = corrupt(tgt, rng, 1)
            cols.append(" ".join(partial))
        lines.append("\t".join(cols))
    return lines


def judgments(rng, n_sources, n_systems):
    sources, hyps, pairwise = [], {}, []
    systems = [f"sys{i + 1:02d}" for i in range(n_systems)]
    skill = {s: 0.9 - 0.06 * i for i, s in enumerate(systems)}
    for j in range(n_sources):
        sid = f"s{j + 1:03d}"
        tgt = clean_sentence(rng)
        n_err = rng.randint(2, 4)
        src = corrupt(tgt, rng, n_err)
        sources.append({"id": sid, "tokens": src})
        residual = {}
        hyps[sid] = {}
        for s in systems:
            left = sum(1 for _ in range(n_err) if rng.random() > skill[s])
            hyps[sid][s] = corrupt(tgt, rng, left) if left else list(tgt)
            residual[s] = left
        for _ in range(6):
            a, b = rng.sample(systems, 2)
            if residual[a] < residual[b]:
                verdict = "a"
            elif residual[b] < residual[a]:
                verdict = "b"
            else:
                verdict = "tie"
            pairwise.append({"source": sid, "a": a, "b": b, "verdict": verdict})
    return {"sources": sources, "systems": systems, "hypotheses": hyps, "human_pairwise": pairwise}


def agreement_fixture(n, concordant):
    """Two systems over n sources, a always judged better; the metric agrees on the first `concordant`."""
    sources = [{"id": f"p{i:04d}", "tokens": ["x"]} for i in range(n)]
    hyps = {s["id"]: {"A": ["a"], "B": ["b"]} for s in sources}
    pairwise = [{"source": s["id"], "a": "A", "b": "B", "verdict": "a"} for s in sources]
    scores = []
    for i, s in enumerate(sources):
        hi, lo = (0.75, 0.25) if i < concordant else (0.25, 0.75)
        scores.append(f"{s['id']}\tA\t{hi}")
        scores.append(f"{s['id']}\tB\t{lo}")
    return {"sources": sources, "systems": ["A", "B"], "hypotheses": hyps, "human_pairwise": pairwise}, scores


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def main():
    rng = random.Random(20240611)
    lines = corpus(rng, 1200)
    write(DATA / "corpus.tsv", "\n".join(lines) + "\n")

    m2_sample = ("S This are a example .\n"
                 "A 1 2|||R:VERB:SVA|||is|||REQUIRED|||-NONE-|||0\n"
                 "A 2 3|||R:DET|||an|||REQUIRED|||-NONE-|||0\n"
                 "A 1 2|||R:VERB:SVA|||is|||REQUIRED|||-NONE-|||1\n"
                 "\n"
                 "S Nothing to fix here .\n"
                 "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
                 "\n"
                 "S He go to school yesterday\n"
                 "A 1 2|||R:VERB:TENSE|||went|||REQUIRED|||-NONE-|||0\n"
                 "A 5 5|||M:PUNCT|||.|||REQUIRED|||-NONE-|||0\n")
    write(DATA / "sample.m2", m2_sample)

    judg = judgments(random.Random(7), 30, 12)
    write(DATA / "judgments.json", json.dumps(judg, indent=1) + "\n")

    # Tiny end-to-end configuration.
    cli = DATA / "cli"
    crng = random.Random(99)
    write(cli / "ged_train.tsv", "\n".join(corpus(crng, 120)) + "\n")
    write(cli / "ged_dev.tsv", "\n".join(corpus(crng, 30)[1:]) + "\n")
    write(cli / "qe.tsv", "\n".join(corpus(crng, 90)[1:]) + "\n")
    small = judgments(random.Random(11), 12, 12)
    write(cli / "judgments.json", json.dumps(small, indent=1) + "\n")
    # External metric: shorter hypotheses score higher, a crude stand-in baseline.
    ext = [f"{sid}\t{sys}\t{-len(toks) + 0.01 * k}"
           for sid, per in small["hypotheses"].items()
           for k, (sys, toks) in enumerate(sorted(per.items()))]
    write(cli / "baseline_scores.tsv", "source_id\tsystem\tscore\n" + "\n".join(ext) + "\n")
    config = {
        "output_dir": "out",
        "corpora": {"ged_train": "ged_train.tsv", "ged_dev": "ged_dev.tsv", "qe": "qe.tsv",
                    "qe_split": [0.6, 0.2, 0.2], "split_seed": 3},
        "taxonomy": "op4",
        "ged_metric": "f0.5",
        "encoder": {"dim": 12, "depth": 1, "min_count": 1},
        "ged_train": {"epochs": 2, "learning_rate": 0.2, "batch_size": 8},
        "qe_train": {"epochs": 3, "learning_rate": 0.2, "batch_size": 8},
        "pairs": {"k": 4, "seed": 5},
        "seeds": [0, 1],
        "scoring": {"mode": "filter_free"},
        "judgments": "judgments.json",
        "metrics": [{"name": "gecqe"}, {"name": "baseline", "scores": "baseline_scores.tsv"}],
        "analysis": {"window": 4, "bootstrap_iterations": 200, "bootstrap_seed": 1, "trueskill_seed": 2},
    }
    write(cli / "config.json", json.dumps(config, indent=2) + "\n")

    # Ingested score files reproducing two published sentence-level accuracies.
    agree_judg, impara = agreement_fixture(1000, 753)
    _, modern = agreement_fixture(1000, 829)
    write(DATA / "agreement" / "judgments.json", json.dumps(agree_judg) + "\n")
    write(DATA / "agreement" / "impara.tsv", "\n".join(impara) + "\n")
    write(DATA / "agreement" / "modernbert_2class.tsv", "\n".join(modern) + "\n")
    write(DATA / "agreement" / "published_sentence_level.tsv", PUBLISHED)


# Published sentence-level Acc and tau on both SEEDA variants.
PUBLISHED = """method\ts_acc\ts_tau\te_acc\te_tau
ERRANT\t.594\t.189\t.608\t.217
PT-ERRANT\t.582\t.165\t.592\t.184
GREEN\t.600\t.199\t.574\t.148
GLEU\t.672\t.343\t.673\t.347
Scribendi\t.660\t.320\t.672\t.345
SOME\t.778\t.555\t.766\t.532
IMPARA\t.753\t.506\t.752\t.504
GPT-4-S\t.784\t.567\t.798\t.595
GPT-4-S+Grammaticality\t.796\t.592\t.807\t.615
GPT-4-S+Fluency\t.819\t.637\t.831\t.662
GPT-4-S+MeaningPreservation\t.810\t.620\t.813\t.626
BERT-base\t.756\t.512\t.754\t.508
BERT-base+2-class\t.773\t.545\t.763\t.527
BERT-base+4-class\t.787\t.574\t.774\t.548
BERT-base+25-class\t.771\t.543\t.752\t.503
BERT-base+55-class\t.763\t.526\t.750\t.499
DeBERTa-v3-large\t.784\t.568\t.779\t.558
DeBERTa-v3-large+2-class\t.797\t.593\t.784\t.568
DeBERTa-v3-large+4-class\t.793\t.585\t.772\t.544
DeBERTa-v3-large+25-class\t.801\t.602\t.786\t.573
DeBERTa-v3-large+55-class\t.782\t.564\t.763\t.527
ModernBERT-large\t.767\t.533\t.749\t.497
ModernBERT-large+2-class\t.829\t.658\t.797\t.594
ModernBERT-large+4-class\t.812\t.624\t.794\t.588
ModernBERT-large+25-class\t.801\t.603\t.783\t.567
ModernBERT-large+55-class\t.749\t.498\t.741\t.483
"""


if __name__ == "__main__":
    main()
