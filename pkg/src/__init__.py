# Induced-subgraph probabilities in random graphs with given degrees
