namespace cablefem {}
