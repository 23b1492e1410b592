# State backends
