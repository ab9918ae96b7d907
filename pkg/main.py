"""
main.py
Command-line entry point for the nilpotent quotient engine.

    python main.py run group.nq --max-class 8 --output result.json
    python main.py query result.json order "[u^-1,v,v,v,v]"
    python main.py verify --include-long
"""

import argparse
import logging
import sys

from acceptance import verify_acceptance
from config import (ACCEPTANCE_OUTPUT_DIR, DEFAULT_OUTPUT, DEFAULT_SEED, INSTANCE_STRATEGIES,
                    INSTANCE_STRATEGY, MEMORY_BUDGET_MB, TIME_BUDGET_SECONDS, VERIFY_SAMPLES)
from exceptions import NqError, WordSyntaxError
from queries import COMMANDS, query
from results import EXIT_COUNTEREXAMPLE, EXIT_OK, EXIT_PARSE_ERROR, JobConfig, load_document, run
from utils import frame_to_text, setup_logging, stats_table


def run_job(args):
    try:
        config = JobConfig(
            input_path=args.input,
            max_class=args.max_class,
            strategy=args.strategy,
            verify_samples=args.samples,
            seed=args.seed,
            time_budget=args.time_budget,
            memory_budget=args.mem_budget,
            output=args.output,
            auto_escalate=not args.no_escalate,
            timings=args.timings,
        )
    except ValueError as exc:
        logging.error(f"❌ {exc}")
        return EXIT_PARSE_ERROR

    document, code = run(config)
    if document is not None:
        print(f"class {document.class_achieved} ({document.termination}), "
              f"{document.n} pc generators")
        print(document.layer_report())
        if document.stats:
            print(frame_to_text(stats_table(document.stats)))
    return code


def run_query(args):
    try:
        document = load_document(args.result)
        print(query(document, args.command, args.args))
    except (OSError, KeyError) as exc:
        logging.error(f"❌ cannot load {args.result}: {exc}")
        return EXIT_PARSE_ERROR
    except (WordSyntaxError, ValueError) as exc:
        logging.error(f"❌ {exc}")
        return EXIT_PARSE_ERROR
    except NqError as exc:
        logging.error(f"❌ {exc}")
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK


def run_acceptance(args):
    logging.info("🚀 Reproducing the Engel quotient computations...")
    table, passed = verify_acceptance(include_long=args.include_long, output_dir=args.output)
    print(frame_to_text(table))
    return EXIT_OK if passed else EXIT_COUNTEREXAMPLE


def build_parser():
    parser = argparse.ArgumentParser(description="Nilpotent quotients with Engel laws")
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    sub = parser.add_subparsers(dest="action", required=True)

    p_run = sub.add_parser("run", help="Compute the largest nilpotent quotient of an input file")
    p_run.add_argument("input", help="Input file (generators/variables/relators/laws)")
    p_run.add_argument("--max-class", type=int, default=None,
                       help="Stop at this class (default: input value or until stable)")
    p_run.add_argument("--strategy", choices=INSTANCE_STRATEGIES, default=INSTANCE_STRATEGY,
                       help="First law-instance strategy of the escalation ladder")
    p_run.add_argument("--samples", type=int, default=VERIFY_SAMPLES,
                       help="Random samples per law for verification")
    p_run.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Verification seed")
    p_run.add_argument("--time-budget", type=float, default=TIME_BUDGET_SECONDS,
                       help="Wall-clock budget in seconds (env NQ_TIME_BUDGET)")
    p_run.add_argument("--mem-budget", type=float, default=MEMORY_BUDGET_MB,
                       help="Peak memory budget in MB (env NQ_MEM_BUDGET)")
    p_run.add_argument("--output", default=DEFAULT_OUTPUT, help="Result and checkpoint path")
    p_run.add_argument("--no-escalate", action="store_true",
                       help="Keep the first strategy even on a counterexample")
    p_run.add_argument("--timings", action="store_true",
                       help="Record per-class seconds in the document")
    p_run.set_defaults(func=run_job)

    p_query = sub.add_parser("query", help="Ask about a stored result")
    p_query.add_argument("result", help="Result document")
    p_query.add_argument("command", choices=COMMANDS)
    p_query.add_argument("args", nargs="*", help="Word and/or weight arguments")
    p_query.set_defaults(func=run_query)

    p_verify = sub.add_parser("verify", help="Run the acceptance suite")
    p_verify.add_argument("--include-long", action="store_true",
                          help="Also run the class-8 quotient K (many hours)")
    p_verify.add_argument("--output", default=ACCEPTANCE_OUTPUT_DIR, help="Directory for documents")
    p_verify.set_defaults(func=run_acceptance)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(logging.DEBUG if args.verbose else logging.INFO)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
