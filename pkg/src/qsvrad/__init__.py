"""Semisupervised anomaly detection with reconstruction SVRs and autoencoders.

Four detectors share one data pipeline: an SVR reconstruction model with a
simulated quantum fidelity kernel (``qsvr``), the same model with an RBF kernel
(``csvr``), a variational quantum autoencoder (``qae``) and a small classical
autoencoder (``cae``).
"""

__version__ = "0.1.0"
