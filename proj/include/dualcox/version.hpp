#pragma once

#define DUALCOX_VERSION "0.1.0"
