# Sunspot area periodicity analysis
