import argparse
from pathlib import Path

from src.components.data.sst_trees import sentiment_items

SPLITS = {"train": "train.txt", "dev": "dev.txt", "test": "test.txt"}


def convert(input_dir: Path, output_dir: Path) -> None:
    output_dir.mkdir(parents=True, exist_ok=True)
    for split, filename in SPLITS.items():
        source = input_dir / filename
        lines = source.read_text(encoding="utf-8").splitlines()
        # phrase-level labels only for training
        items = sentiment_items(lines, phrases=split == "train", source=source)
        target = output_dir / f"{split}.tsv"
        with open(target, "w", encoding="utf-8") as f:
            for text, label in items:
                f.write(f"{text}\t{label}\n")
        print(f"{split}: {len(items)} items written to {target}")


def main():
    # Set up argument parser
    parser = argparse.ArgumentParser(description="Convert sentiment treebank trees into the sst2 TSV layout")
    parser.add_argument("--input", type=Path, required=True,
                        help="directory holding train.txt, dev.txt and test.txt trees")
    parser.add_argument("--output", type=Path, required=True,
                        help="output directory, usually <data-dir>/sst2")

    args = parser.parse_args()
    try:
        convert(args.input, args.output)
    except FileNotFoundError as e:
        print(f"Error: {e}")


if __name__ == "__main__":
    main()
