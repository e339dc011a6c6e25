#!/usr/bin/env python3
"""Build the bundled public-domain corpora under data/.

Sources (all public domain, fetched from the npm registry):
  @stdlib/datasets-sotu        State of the Union addresses 1790-2016
  @stdlib/datasets-moby-dick   Moby Dick, by Herman Melville
  kjv                          King James Version of the Bible (1769 text)

Usage:
  npm pack @stdlib/datasets-sotu @stdlib/datasets-moby-dick kjv
  (unpack each into its own directory)
  tools/prepare_corpora.py --sotu sotu/package --moby moby/package \
      --kjv kjv/package --out data

Output is one document (sentence) per line, lowercase alphabetic tokens
separated by single spaces.
"""
import argparse
import glob
import gzip
import json
import os
import re

SENTENCE_END = re.compile(r"(?<=[.!?;:])\s+")
TOKEN = re.compile(r"[a-z]+(?:['’][a-z]+)*")


def sentences(text):
    for sent in SENTENCE_END.split(text):
        toks = [t.replace("'", "").replace("’", "") for t in TOKEN.findall(sent.lower())]
        if len(toks) >= 2:
            yield " ".join(toks)


def sotu_docs(root, parties=None, since=0):
    for path in sorted(glob.glob(os.path.join(root, "data", "*.txt"))):
        name = os.path.basename(path)[:-4]
        year, party = int(name[:4]), name.rsplit("_", 1)[1]
        if year < since or (parties is not None and party not in parties):
            continue
        with open(path, encoding="utf-8") as f:
            yield from sentences(f.read())


def moby_docs(root):
    paths = glob.glob(os.path.join(root, "data", "chapter_*.txt"))
    paths.sort(key=lambda p: int(re.search(r"chapter_(\d+)", p).group(1)))
    for path in paths:
        with open(path, encoding="utf-8") as f:
            yield from sentences(f.read())


def kjv_docs(root):
    with open(os.path.join(root, "json", "verses-1769.json"), encoding="utf-8") as f:
        verses = json.load(f)
    for text in verses.values():
        yield from sentences(text.replace("[", "").replace("]", ""))


def write(path, docs):
    n_docs = n_tok = 0
    # mtime=0 keeps the archive bytes reproducible
    with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as out:
        for d in docs:
            out.write((d + "\n").encode("utf-8"))
            n_docs += 1
            n_tok += d.count(" ") + 1
    print(f"{path}: {n_docs} documents, {n_tok} tokens")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sotu", required=True)
    ap.add_argument("--moby", required=True)
    ap.add_argument("--kjv", required=True)
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    def desk():
        yield from sotu_docs(args.sotu)
        yield from kjv_docs(args.kjv)
        yield from moby_docs(args.moby)

    write(os.path.join(args.out, "desk_corpus.txt.gz"), desk())
    write(os.path.join(args.out, "sotu_dem.txt.gz"), sotu_docs(args.sotu, {"d"}, since=1933))
    write(os.path.join(args.out, "sotu_rep.txt.gz"), sotu_docs(args.sotu, {"r"}, since=1933))


if __name__ == "__main__":
    main()
