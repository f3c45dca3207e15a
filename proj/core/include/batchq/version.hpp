#pragma once

#define BATCHQ_VERSION_MAJOR 1
#define BATCHQ_VERSION_MINOR 0
#define BATCHQ_VERSION_PATCH 0
#define BATCHQ_VERSION_STRING "1.0.0"
