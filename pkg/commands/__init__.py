# Command modules for the slemwatch CLI
