"""Binary rank-distance codes for multi-antenna ISI channels.

Modules
-------
gf          arithmetic in GF(2^T), trace and dual basis
binmat      packed GF(2) matrices and rank
rankcodes   the code set S, codeword matrices and their Toeplitz lift
minbasis    null-space machinery and determinant checks
constellation, multilevel
            PSK/QAM partition mappers and multi-level codewords
trellis     zero-tailed convolutional construction
channel     Rayleigh MIMO-ISI simulator with ML decoding
cli         command-line driver
"""

__version__ = "0.1.0"
