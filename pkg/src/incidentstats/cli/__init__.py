from .main import RunConfig, build_parser, main
from .synth import SynthSpec, generate_synthetic, synth_nb_sample

__all__ = ["RunConfig", "build_parser", "main", "SynthSpec", "generate_synthetic",
           "synth_nb_sample"]
