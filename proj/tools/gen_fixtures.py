#!/usr/bin/env python3
"""Regenerates the deterministic fixtures under data/fixtures."""

import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "data" / "fixtures"

FILLER = ("ngai hpe gaw ga ai majaw sha lu re na kaw de nga mi wa "
          "shi yu hkrai lam ning hte rai sai ka dai kun").split()

PEOPLE = ["Alice", "Bob", "Maria Lopez", "Zau Seng", "Hkawng Nan", "Kenji Sato",
          "Amina Yusuf", "Peter Brown", "Lahpai Tu", "Nang Mai"]
PLACES = ["Myitkyina", "Yangon", "Kachin State", "Tokyo", "Paris", "Accra",
          "Kumasi", "Tabriz", "Bhamo", "Mandalay"]
ORGS = ["Red Cross", "United Nations", "World Bank", "Kachin Baptist Convention"]
DATES = ["May 4", "June 12", "March 2024"]

TEMPLATES = [
    "{p} travelled to {l} last week .",
    "{p} met {q} in {l} .",
    "The {o} opened an office in {l} on {d} .",
    "Yesterday {p} spoke with staff from the {o} .",
    "Farmers near {l} sold rice to traders from {m} .",
    "A new school in {l} was opened by {p} .",
    "{p} said the road from {l} to {m} is closed .",
    "On {d} the {o} sent food to {l} .",
]

NO_ENTITY = [
    "the rain stopped before noon and the children went outside .",
    "we cooked rice and fish for everyone in the village .",
    "it is very cold in the mountains at night .",
    "they walked slowly along the river to the market .",
    "she was tired after working in the field all day .",
    "the old bridge needs to be repaired soon .",
    "he wrote a short letter to his brother .",
    "there is not enough water for the animals this year .",
    "you should drink tea when you feel sick .",
    "our teacher told us a story about the forest .",
]


def filler(rng, n):
    return [rng.choice(FILLER) for _ in range(n)]


def write_pair(dirpath, stem, sources, refs, src_tag, tgt_tag):
    dirpath.mkdir(parents=True, exist_ok=True)
    (dirpath / f"{stem}.{src_tag}").write_text("\n".join(sources) + "\n", encoding="utf-8")
    (dirpath / f"{stem}.{tgt_tag}").write_text("\n".join(refs) + "\n", encoding="utf-8")


def adversary(rng):
    sources, refs = [], []
    for i in range(50):
        t = TEMPLATES[i % len(TEMPLATES)]
        p, q = rng.sample(PEOPLE, 2)
        l, m = rng.sample(PLACES, 2)
        fields = dict(p=p, q=q, l=l, m=m, o=rng.choice(ORGS), d=rng.choice(DATES))
        src = t.format(**fields)
        planted = [v for k, v in fields.items() if "{" + k + "}" in t]
        words = filler(rng, rng.randint(4, 12))
        for e in planted:
            words.insert(rng.randint(0, len(words)), e)
        sources.append(src)
        refs.append(" ".join(words) + " .")
    d = ROOT / "adversary"
    write_pair(d, "entities", sources, refs, "eng_Latn", "kac_Latn")
    refs = [" ".join(filler(rng, rng.randint(5, 12))) + " ." for _ in NO_ENTITY]
    write_pair(d, "no_entities", NO_ENTITY, refs, "eng_Latn", "kac_Latn")


# (correct, minor, major, critical) per language, 50 sentences each.
SEVERITY = {
    "kac_Latn": (1, 21, 15, 13),
    "twi_Latn": (13, 29, 8, 0),
    "jpn_Jpan": (27, 14, 5, 4),
    "azb_Arab": (8, 31, 10, 1),
}

ERROR_CATS = ["Wrong grammar", "Mistranslation", "Unnatural translation", "Wrong spelling",
              "Inaccurately omitted information", "Wrong punctuation"]


def severity(rng):
    d = ROOT / "severity"
    d.mkdir(parents=True, exist_ok=True)
    for tag, (c, em, ema, ec) in SEVERITY.items():
        labels = ["correct"] * c + ["minor"] * em + ["major"] * ema + ["critical"] * ec
        rng.shuffle(labels)
        rows = ["id\tsource\treference"]
        lines = []
        for i, label in enumerate(labels):
            src = f"sentence {i} about the weather in the village ."
            ref = " ".join(filler(rng, rng.randint(5, 10)))
            rows.append(f"{i}\t{src}\t{ref}")
            rec = {"pair_id": i, "annotator_id": "annotator-1",
                   "timestamp": f"2024-06-01T10:{i // 60:02d}:{i % 60:02d}Z"}
            if label == "correct":
                rec["categories"] = ["Correct"]
            else:
                rec["categories"] = rng.sample(ERROR_CATS, rng.randint(1, 2))
                rec["severity"] = label
                words = ref.split()
                words[0] = rng.choice(FILLER)
                rec["corrected_translation"] = " ".join(words)
            lines.append(json.dumps(rec, ensure_ascii=False))
        (d / f"{tag}.tsv").write_text("\n".join(rows) + "\n", encoding="utf-8")
        meta = {"name": tag, "source_lang": "eng_Latn", "target_lang": tag, "split": "dev"}
        (d / f"{tag}.tsv.meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        (d / f"{tag}.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")


def harness():
    d = ROOT / "harness"
    d.mkdir(parents=True, exist_ok=True)
    (d / "baseline_row.csv").write_text(
        "system_name,training_tag,direction,PARADISEC (test) BLEU,PARADISEC (test) ChrF++,"
        "FLORES (devtest) BLEU,FLORES (devtest) ChrF++,Dialogue BLEU,Dialogue ChrF++,"
        "Average BLEU,Average ChrF++\n"
        "NLLB-600M,Baseline,kac_Latn-eng_Latn,2.32,20.34,12.77,35.47,17.35,32.42,10.81,29.41\n",
        encoding="utf-8")


if __name__ == "__main__":
    rng = random.Random(20240601)
    adversary(rng)
    severity(rng)
    harness()
