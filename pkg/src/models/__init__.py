# Degree sequences, bipartitions and restricted pairings
