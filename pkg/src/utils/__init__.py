# Shared errors, settings and numerics
