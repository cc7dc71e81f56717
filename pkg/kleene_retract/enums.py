"""Enumerations used across kleene-retract."""

import enum


class Order(str, enum.Enum):
    """Result of comparing two dyadic rationals."""

    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"


class Condition(str, enum.Enum):
    """Which half of a convergence characterization a check refers to."""

    POINTWISE = "a"  # coordinatewise convergence
    NORM = "b"  # convergence of the norms


class Lemma61Status(str, enum.Enum):
    """Outcome of a tail-bound check on the retraction."""

    PASS = "pass"
    FAIL = "fail"
    HYPOTHESIS_FAIL = "hypothesis fail"


class HypothesisBasis(str, enum.Enum):
    """How the hypothesis of a tail-bound check was established."""

    PROVED = "proved"  # from the tail bound of a known source point
    SAMPLED = "sampled"  # from probes on a finite window


class WitnessFailure(str, enum.Enum):
    """Reason a witness chain failed re-verification."""

    GRID = "grid"
    SHAPE = "shape"
    PREFIX = "prefix"
    DISTANCE = "distance"
    MEMBER_X = "member_x"
    MEMBER_Y = "member_y"
    NORM = "norm"


class RefutationVerdict(str, enum.Enum):
    """Outcome of transporting the adversary through a section."""

    REFUTED = "no clopen margin"
    NOT_A_SEPARATOR = "not a separator"


class Command(str, enum.Enum):
    """Commands offered by the command-line interface."""

    ROUNDTRIP = "roundtrip"
    ADVERSARY = "adversary"
    CHECKS = "checks"


class Suite(str, enum.Enum):
    """Property suites runnable through ``--command checks``."""

    LEMMA1 = "lemma1"
    LEMMA4 = "lemma4"
    LEMMA5 = "lemma5"
    LEMMA6 = "lemma6"
    LEMMA7 = "lemma7"
    CANTOR = "cantor"
    BAIRE = "baire"
    METRIC = "metric"
    FILTRATION = "filtration"
    LEMMA10 = "lemma10"


class OutputFormat(str, enum.Enum):
    """Report formats."""

    TEXT = "text"
    STRUCTURED = "structured"
    JSON = "json"
