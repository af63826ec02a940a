"""Regenerates the bundled test fixtures.

    python3 scripts/gen_fixtures.py

Writes crates/core/tests/fixtures/corpus.jsonl (1000 texts) and
crates/core/tests/fixtures/alpaca100.jsonl (100 instruction examples).
Output is fully determined by the fixed seed.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"

NOUNS = """cat dog river city teacher student garden house window book tree
mountain ocean computer phone market village school bridge road engine forest
island doctor nurse farmer child parent friend neighbor bakery library museum
planet star storm winter summer morning evening kitchen table chair letter
story song painting camera bicycle train station harbor valley desert cloud
language question answer problem idea method result system network database
policy government economy budget company product customer service battery
energy water coffee bread apple garden meeting project report science history""".split()

VERBS = """walk run write read build explain carry visit teach learn open close
watch find help plan cook clean paint repair design measure compare describe
improve protect collect deliver create discover choose travel remember follow
support manage answer share study change grow move""".split()

PAST = """walked ran wrote read built explained carried visited taught learned
opened closed watched found helped planned cooked cleaned painted repaired
designed measured compared described improved protected collected delivered
created discovered chose traveled remembered followed supported managed""".split()

ADJS = """big small happy green quick bright calm old new young tall short
warm cold busy quiet simple careful strong gentle clever curious modern ancient
useful healthy famous heavy light dark early late clear difficult easy important
beautiful dangerous popular efficient reliable""".split()

ADVS = """quickly slowly carefully often usually always never sometimes really
very quite almost nearly soon later together""".split()

DETS = ["the", "a", "this", "that", "every", "our", "their", "my", "one"]
PREPS = ["in", "on", "near", "behind", "under", "across", "through", "with", "from", "during"]
CONJ = ["and", "but", "because", "so", "while", "although"]

EXTRAS = [
    "Dr. Lee said it was fine.",
    "The price rose to 3.5 percent in 2021.",
    "We don't know why, and it's not clear.",
    "It was a well-known trick, e.g. in old films.",
    "She asked, “Is this the right road?”",
    "Wait… are you sure?",
    "About 1,000 people came (most of them by train).",
    "Mr. and Mrs. Brown live at No. 12.",
    "It costs $40; that's too much!",
    "The U.S. team won 3-2.",
]


def noun_phrase(rng):
    parts = [rng.choice(DETS)]
    if rng.random() < 0.45:
        parts.append(rng.choice(ADJS))
    noun = rng.choice(NOUNS)
    if parts[0] not in ("a", "this", "that", "every", "one") and rng.random() < 0.3:
        noun += "s"
    parts.append(noun)
    return " ".join(parts)


def clause(rng):
    subj = noun_phrase(rng)
    verb = rng.choice(PAST if rng.random() < 0.6 else VERBS)
    words = [subj]
    if rng.random() < 0.25:
        words.append(rng.choice(ADVS))
    words.append(verb)
    words.append(noun_phrase(rng))
    if rng.random() < 0.5:
        words.append(rng.choice(PREPS))
        words.append(noun_phrase(rng))
    return " ".join(words)


def sentence(rng):
    s = clause(rng)
    if rng.random() < 0.3:
        s += ", " + rng.choice(CONJ) + " " + clause(rng)
    s = s[0].upper() + s[1:]
    end = rng.choices([".", "!", "?"], weights=[85, 7, 8])[0]
    return s + end


def paragraph(rng, n_sentences):
    out = []
    for _ in range(n_sentences):
        if rng.random() < 0.06:
            out.append(rng.choice(EXTRAS))
        else:
            out.append(sentence(rng))
    return " ".join(out)


def corpus(rng):
    texts = []
    for i in range(1000):
        r = rng.random()
        if r < 0.03:
            text = rng.choice(NOUNS).capitalize()
        elif r < 0.06:
            text = clause(rng)  # no closing punctuation
        else:
            text = paragraph(rng, rng.randint(1, 12))
        if rng.random() < 0.05:
            text = "  " + text.replace(" ", "\n", 1) + "\n"
        texts.append({"id": f"c{i:04d}", "text": text})
    return texts


INSTRUCTIONS = [
    "Describe a day in the life of a {n}.",
    "Explain how a {n} works to a child.",
    "Write a short story about a {a} {n}.",
    "Give advice to someone who wants to {v} a {n}.",
    "Summarize the history of the {n}.",
    "Compare a {n} and a {n2}.",
    "Write a paragraph about why people {v} every day.",
    "List some reasons to visit a {a} {n}.",
]


def alpaca(rng):
    rows = []
    for i in range(100):
        tmpl = rng.choice(INSTRUCTIONS)
        instruction = tmpl.format(
            n=rng.choice(NOUNS), n2=rng.choice(NOUNS), a=rng.choice(ADJS), v=rng.choice(VERBS)
        )
        inp = ""
        if rng.random() < 0.3:
            inp = sentence(rng)
        output = paragraph(rng, rng.randint(3, 8))
        rows.append({"id": f"ex{i:03d}", "instruction": instruction, "input": inp, "output": output})
    return rows


def write(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write(OUT / "corpus.jsonl", corpus(random.Random(7)))
    write(OUT / "alpaca100.jsonl", alpaca(random.Random(11)))


if __name__ == "__main__":
    main()
