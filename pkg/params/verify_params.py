import logging


class VerifyParams:
    """
    A class that represents self-verification parameters.

    There are default values for every parameter if it is not present
    in the ``verify_params`` section of ``config.json``; command-line flags
    override both via ``override()``.
    """
    logger: logging.Logger

    trials: int = 100
    forms_trials: int = 200
    seed: int = 2024
    max_order: int = 5

    max_in_dim: int = 3
    max_out_dim: int = 3

    partition_max_cardinality: int = 8
    float_tolerance: float = 1e-9

    parallel: bool = True

    def __init__(
            self,
            logger: logging.Logger,
            params: dict
    ):
        self.logger = logger

        for name in ("trials", "forms_trials", "max_order", "partition_max_cardinality"):
            if name not in params or not isinstance(params[name], int) or params[name] <= 0:
                self.logger.warning(f"`{name}` field is not present or ≤ `0`: "
                                    f"a default parameter of `{getattr(self, name)}` will be used")
            else:
                setattr(self, name, params[name])

        if "seed" not in params or not isinstance(params["seed"], int) or params["seed"] < 0:
            self.logger.warning(f"`seed` field is not present or < `0`: "
                                f"a default parameter of `{self.seed}` will be used")
        else:
            self.seed = params["seed"]

        if "dims" not in params:
            self.logger.warning(f"`dims` field is not present: "
                                f"a default parameter of `{self.max_in_dim},{self.max_out_dim}` will be used")
        else:
            self.set_dims(params["dims"])

        if "float_tolerance" not in params or not isinstance(params["float_tolerance"], (int, float)) \
                or params["float_tolerance"] <= 0:
            self.logger.warning(f"`float_tolerance` field is not present or ≤ `0`: "
                                f"a default parameter of `{self.float_tolerance}` will be used")
        else:
            self.float_tolerance = float(params["float_tolerance"])

        if "parallel" in params:
            self.parallel = bool(params["parallel"])

    def set_dims(self, dims: str):
        """
        Parses ``"d,c"`` into the largest input and output dimensions to sample.

        :raises ValueError: when ``dims`` is not two positive integers
        """
        try:
            in_dim, out_dim = (int(part) for part in str(dims).split(","))
        except ValueError:
            raise ValueError(f"`dims` must look like `d,c`, got `{dims}`")

        if in_dim <= 0 or out_dim <= 0:
            raise ValueError(f"`dims` must be positive, got `{dims}`")

        self.max_in_dim = in_dim
        self.max_out_dim = out_dim

    def override(
            self,
            trials: int | None = None,
            seed: int | None = None,
            max_order: int | None = None,
            dims: str | None = None
    ):
        """
        Applies command-line flags on top of configured values.
        """
        if trials is not None:
            if trials <= 0:
                raise ValueError(f"`--trials` must be positive, got `{trials}`")
            self.trials = trials
            self.forms_trials = trials

        if seed is not None:
            if seed < 0:
                raise ValueError(f"`--seed` must be nonnegative, got `{seed}`")
            self.seed = seed

        if max_order is not None:
            if max_order <= 0:
                raise ValueError(f"`--max-order` must be positive, got `{max_order}`")
            self.max_order = max_order

        if dims is not None:
            self.set_dims(dims)

    def get_logger(self) -> logging.Logger:
        """
        Gets a ``Logger`` object for verification runs.
        """
        return self.logger

    def get_trials(self) -> int:
        """
        Gets number of random compositions checked against the oracle.
        """
        return self.trials

    def get_forms_trials(self) -> int:
        """
        Gets number of random jet pairs on which both chain-rule forms are compared.
        """
        return self.forms_trials

    def get_seed(self) -> int:
        return self.seed

    def get_max_order(self) -> int:
        """
        Gets the highest derivative order used by the jet suites.
        """
        return self.max_order

    def get_dims(self) -> tuple[int, int]:
        """
        Gets the largest ``(d, c)`` sampled: ``g`` maps ``R^d`` to ``R^c``.
        """
        return self.max_in_dim, self.max_out_dim

    def get_partition_max_cardinality(self) -> int:
        """
        Gets the largest index size covered by the exhaustive partition suites.
        """
        return self.partition_max_cardinality

    def get_float_tolerance(self) -> float:
        return self.float_tolerance

    def is_parallel(self) -> bool:
        """
        Whether suites run in their own threads.
        """
        return self.parallel
