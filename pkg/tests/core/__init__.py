# Core module tests