import os

######################## ENGINE SETTINGS ##############################
ENGINE_VERSION = "nqengel 1.0.0"

DEFAULT_MAX_CLASS = None            # None = run until the new layer is trivial

# law instantiation, cheapest first; "polynomial" enforces commutator laws exactly
INSTANCE_STRATEGY = "polynomial"
INSTANCE_STRATEGIES = ("generators", "generators_plus_pairs", "polynomial")
AUTO_ESCALATE = True                # rebuild a class with the next strategy on a counterexample


######################## ELIMINATION SETTINGS #########################
HNF_BATCH_ROWS = 256                # relation rows reduced per batch


######################## COLLECTION SETTINGS ##########################
COLLECTION_STEP_LIMIT = 50_000_000  # stack pops per single collection


######################## VERIFICATION SETTINGS ########################
VERIFY_SAMPLES = 500
SAMPLE_EXPONENT_RANGE = 3           # exponents drawn from [-3, 3]
DEFAULT_SEED = 0


######################## BUDGET SETTINGS ##############################
# Overridable from the environment, e.g. NQ_TIME_BUDGET=7200
TIME_BUDGET_SECONDS = float(os.environ.get("NQ_TIME_BUDGET", 6 * 3600))
MEMORY_BUDGET_MB = float(os.environ.get("NQ_MEM_BUDGET", 8192))


######################## OUTPUT SETTINGS ##############################
DEFAULT_OUTPUT = "nq_result.json"
ACCEPTANCE_OUTPUT_DIR = "acceptance_results"
LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
