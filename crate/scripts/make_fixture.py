#!/usr/bin/env python3
"""Generate the bundled two-period mini corpus (1930s / 1980s).

Sentences are built from word classes that share context words, so every
class forms a distributional cluster. Between the periods some members are
swapped for their modern/old counterparts; the rest stay put and act as
alignment anchors.

    python3 scripts/make_fixture.py fixtures/mini
"""
import json
import random
import sys
from pathlib import Path

SEED = 1923
DOCS_PER_PERIOD = 50

# class -> (context words, {member: (weight 1930s, weight 1980s)}).
# "ekran" moves from the food contexts to the media contexts.
CLASSES = {
    "food": (
        ["ye", "iç", "sofra", "taze", "sıcak"],
        {"ekmek": (5, 5), "peynir": (3, 3), "süt": (3, 3), "çorba": (3, 3), "su": (4, 4), "ekran": (3, 0)},
    ),
    "family": (
        ["ev", "sev", "aile", "büyük", "küçük"],
        {"anne": (4, 4), "baba": (4, 4), "kardeş": (3, 3), "çocuk": (4, 4)},
    ),
    "council": (
        ["karar", "toplantı", "kabul", "teklif", "madde"],
        {"meclis": (4, 4), "kanun": (4, 4), "hükümet": (3, 3), "reis": (3, 1),
         "başkan": (1, 4), "aza": (3, 1), "üye": (1, 3), "kâtip": (2, 0), "katip": (0, 2)},
    ),
    "time": (
        ["geçen", "bu", "her", "içinde", "sonra"],
        {"sene": (8, 1), "yıl": (0, 8), "ay": (4, 4), "gün": (4, 4), "hafta": (3, 3)},
    ),
    "media": (
        ["haber", "yayın", "program", "dinle", "izle"],
        {"radyo": (4, 3), "gazete": (5, 4), "sinema": (3, 3), "televizyon": (0, 5), "ekran": (0, 3)},
    ),
    "official": (
        ["imza", "dosya", "ver", "resmi", "kayıt"],
        {"vesika": (6, 1), "belge": (1, 6), "rapor": (3, 3), "dilekçe": (3, 3)},
    ),
    "need": (
        ["olmak", "için", "şart", "hal", "sebep"],
        {"mucip": (6, 1), "gerek": (2, 7), "lâzım": (3, 1), "lazım": (0, 3)},
    ),
    "writing": (
        ["yaz", "oku", "gönder", "sayfa", "kalem"],
        {"kitab": (5, 1), "kitap": (3, 8), "mektub": (4, 1), "mektup": (2, 6),
         "hesab": (3, 1), "hesap": (2, 5), "hikâye": (2, 0), "hikaye": (0, 2)},
    ),
    "people": (
        ["bey", "efendi", "geldi", "söyledi", "sordu"],
        {"ahmed": (4, 1), "ahmet": (1, 4), "mehmed": (3, 1), "mehmet": (1, 4)},
    ),
}

# surfaces the analyzer maps to a different lemma
INFLECTED = {
    "seneler": "sene", "senede": "sene", "yıllar": "yıl", "yılda": "yıl",
    "gazeteler": "gazete", "belgeler": "belge", "vesikalar": "vesika",
    "kitaplar": "kitap", "haberleri": "haber", "kararı": "karar",
}
INFLECT_OF = {lemma: [s for s, l in INFLECTED.items() if l == lemma] for lemma in set(INFLECTED.values())}

FILLERS = ["ve", "bir", "çok", "daha", "ile"]
# surfaces left out of the analyzer table: the lemmatizer falls back to a prefix
UNANALYZED = ["muvaffakiyetle", "hakikaten"]
VERB_ET = ["et", "ed"]


def pick(rng, weighted):
    words = [w for w, wt in weighted if wt > 0]
    weights = [wt for w, wt in weighted if wt > 0]
    return rng.choices(words, weights=weights, k=1)[0]


def sentence(rng, era):
    cls = rng.choice(sorted(CLASSES))
    contexts, members = CLASSES[cls]
    member = pick(rng, [(m, w[era]) for m, w in sorted(members.items())])
    if member in INFLECT_OF and rng.random() < 0.25:
        member = rng.choice(INFLECT_OF[member])
    words = [rng.choice(contexts), rng.choice(contexts), member, rng.choice(contexts)]
    if rng.random() < 0.5:
        words.append(rng.choice(contexts))
    if rng.random() < 0.3:
        words.insert(0, rng.choice(FILLERS))
    if rng.random() < 0.15:
        words.append(VERB_ET[0] if era == 1 or rng.random() < 0.6 else VERB_ET[1])
    if rng.random() < 0.05:
        words.insert(1, rng.choice(UNANALYZED))
    words = [w if w != "karar" or rng.random() < 0.8 else "kararı" for w in words]
    first = words[0]
    words[0] = ("İ" + first[1:]) if first.startswith("i") else first[0].upper() + first[1:]
    end = rng.choice([".", ".", ".", "!", ";"])
    text = " ".join(words) + end
    if rng.random() < 0.1:
        text = text.replace(" ", rng.choice(["\t", "  ", " \t", " "]), 1)
    if rng.random() < 0.05:
        text += " (" + str(rng.randint(1, 99)) + ")"
    return text


def document(rng, era, year):
    lines = [f"{year} tarihli nüsha ,"]
    for _ in range(rng.randint(8, 14)):
        lines.append(sentence(rng, era))
    if rng.random() < 0.2:
        lines.append("sayfa-" + str(rng.randint(1, 9)) + " md5x9 ..")
    body = "\n".join(lines) + "\n"
    if rng.random() < 0.1:
        body = body.replace("ekmek", "ek\u00admek", 1)
    return body


def main(out):
    rng = random.Random(SEED)
    out = Path(out)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    manifest = []
    surfaces = set()
    for era, decade in ((0, 1930), (1, 1980)):
        for i in range(DOCS_PER_PERIOD):
            year = decade + i % 10
            doc_id = f"g{year}-{i:02d}"
            path = f"docs/{doc_id}.txt"
            (out / path).write_text(document(rng, era, year), encoding="utf-8")
            month, day = 1 + (i * 7) % 12, 1 + (i * 11) % 28
            manifest.append({"id": doc_id, "date": f"{year}-{month:02d}-{day:02d}",
                             "source": "gazette" if i % 3 else "bulletin", "path": path})
    for contexts, members in CLASSES.values():
        surfaces.update(contexts)
        surfaces.update(members)
    surfaces.update(FILLERS)
    surfaces.update(VERB_ET)
    surfaces.update(["tarihli", "nüsha", "sayfa"])
    table = {s: s for s in surfaces}
    table.update(INFLECTED)
    (out / "manifest.json").write_text(json.dumps(manifest, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    (out / "analyzer.tsv").write_text("".join(f"{s}\t{l}\n" for s, l in sorted(table.items())), encoding="utf-8")
    config = {"corpus_root": ".", "analyzer": "analyzer.tsv", "embedding": {"dim": 12}, "seed": 7}
    (out / "diachron.json").write_text(json.dumps(config, indent=1) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/mini")
