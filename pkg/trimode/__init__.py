# Three-mode entanglement library
