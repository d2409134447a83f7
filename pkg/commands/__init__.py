# Command modules for the OPDAD simulator
