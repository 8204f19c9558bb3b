"""The ``export-ldp`` command."""

import argparse
import sys

from .export import ExportJob, export


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="export-ldp",
        description="encode LDP strings with a pretrained sentence encoder",
    )
    parser.add_argument("--in", dest="input_path", required=True,
                        help="text file with one LDP string per line")
    parser.add_argument("--model", required=True,
                        help="sentence-encoder model name or local path")
    parser.add_argument("--out", dest="output_path", required=True,
                        help="vector file to write")
    parser.add_argument("--render", choices=("raw", "joined"), default="raw",
                        help="feed the raw path string or space-joined tokens")
    parser.add_argument("--batch", type=int, default=64, help="encoding batch size")
    args = parser.parse_args(argv)

    job = ExportJob(
        input_path=args.input_path,
        model_name=args.model,
        output_path=args.output_path,
        batch_size=args.batch,
        render=args.render,
    )
    try:
        rows = export(job)
    except Exception as err:
        print(f"export-ldp: {err}", file=sys.stderr)
        return 1
    print(f"{args.output_path}: {rows} vectors")
    return 0


if __name__ == "__main__":
    sys.exit(main())
