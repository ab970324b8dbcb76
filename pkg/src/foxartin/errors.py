"""Exception hierarchy shared by every module of the package."""


class FoxArtinError(Exception):
    """Base class for all package errors."""


class ZeroPoint(FoxArtinError, ValueError):
    """The origin was passed where the covering omits it."""


class PoleSingularity(FoxArtinError, ValueError):
    """A stereographic chart was asked to project its own removed pole."""


class ConstructionFailed(FoxArtinError):
    """Generated arc geometry does not pass its own verifier."""


class ChainBroken(FoxArtinError):
    """Consecutive copies of the generator do not share an endpoint."""


class DegenerateAfterPerturbation(FoxArtinError):
    """Exact predicates stay degenerate even under symbolic perturbation."""


class OutsideCylinder(FoxArtinError, ValueError):
    """A point lies outside the model cylinder C."""


class OutsideTube(FoxArtinError, ValueError):
    """A point lies outside the tubular neighbourhood of the arc."""


class NotFound(FoxArtinError):
    """A search (e.g. for shell indices k_S, k_N) did not succeed."""


class GluingFailed(FoxArtinError):
    """The gluing map fails its equivariance or alignment residual."""


class OutsideDomain(FoxArtinError, ValueError):
    """A point lies in a disk that was cut out of a glued sphere."""


class EvaluationFailed(FoxArtinError):
    """A map raised while being sampled for a finite-difference stencil."""


class NotFixed(FoxArtinError, ValueError):
    """The point handed to the classifier is not (numerically) fixed."""


class DivergedOffChart(FoxArtinError):
    """An iterate left every chart without a swap rule."""
