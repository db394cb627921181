# Switching engine
