# Asymptotic formulas and exhaustive oracles
