from .bitstream import ProbabilityEstimate, ThresholdChain, probability, threshold_bitstream
from .pcurve import (FitError, PCurve, SigmoidFit, center_pcurve, extract_pcurve, fit_sigmoid,
                     pcurve_from_points, sigmoid)
