# Periodicity analysis chain
