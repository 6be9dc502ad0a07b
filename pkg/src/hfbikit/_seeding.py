import numpy as np


def derive_seed(master, *index: int) -> int:
    """Deterministic child seed for task ``index`` under ``master``.

    Independent of the order in which tasks are executed.
    """
    base = 0 if master is None else int(master)
    return int(np.random.SeedSequence([base, *map(int, index)]).generate_state(1)[0])
