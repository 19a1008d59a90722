# Core module: settings, logging, errors and the numerical kernel
