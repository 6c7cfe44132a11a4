try:
    # wheel layout: the extension lives inside the package
    from ._bdsim import (
        Topology,
        compare_runs,
        generate_usecase_fixture,
        mapper_size,
        reducer_size,
        run_scenario,
    )
except ImportError:
    # in-tree build: the extension is a top-level module on sys.path
    from _bdsim import (
        Topology,
        compare_runs,
        generate_usecase_fixture,
        mapper_size,
        reducer_size,
        run_scenario,
    )

__all__ = [
    "Topology",
    "compare_runs",
    "generate_usecase_fixture",
    "mapper_size",
    "reducer_size",
    "run_scenario",
]
