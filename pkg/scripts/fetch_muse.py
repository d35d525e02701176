"""Download bilingual dictionaries and fastText Wikipedia vectors for a language pair."""

import os
import sys

import requests

DATA_DIR = os.path.join(os.path.dirname(__file__), "..", "data")

DICTIONARY_URL = "https://dl.fbaipublicfiles.com/arrival/dictionaries/{src}-{tgt}.{split}.txt"
VECTORS_URL = "https://dl.fbaipublicfiles.com/fasttext/vectors-wiki/wiki.{lang}.vec"

# train and test splits of the ground-truth dictionaries
SPLITS = {"train": "0-5000", "test": "5000-6500"}


def download(url, path, chunk_size=1 << 20):
    if os.path.exists(path):
        print(f"  exists: {path}")
        return path
    print(f"  fetching {url}")
    response = requests.get(url, stream=True, timeout=60)
    if response.status_code != 200:
        raise RuntimeError(f"{url}: HTTP {response.status_code}")
    tmp = path + ".part"
    with open(tmp, "wb") as f:
        for chunk in response.iter_content(chunk_size=chunk_size):
            f.write(chunk)
    os.replace(tmp, path)
    return path


def fetch_pair(src, tgt, vectors=True):
    out = os.path.join(DATA_DIR, f"{src}-{tgt}")
    os.makedirs(out, exist_ok=True)
    print(f"{src}-{tgt} -> {out}")
    for name, split in SPLITS.items():
        download(DICTIONARY_URL.format(src=src, tgt=tgt, split=split), os.path.join(out, f"{name}.txt"))
    if vectors:
        for lang in (src, tgt):
            download(VECTORS_URL.format(lang=lang), os.path.join(DATA_DIR, f"wiki.{lang}.vec"))


def main():
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    if not args:
        print("usage: python scripts/fetch_muse.py SRC-TGT [SRC-TGT ...] [--no-vectors]")
        sys.exit(2)
    for pair in args:
        src, tgt = pair.split("-", 1)
        fetch_pair(src, tgt, vectors="--no-vectors" not in sys.argv)


if __name__ == "__main__":
    main()
