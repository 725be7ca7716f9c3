package orbit.sensors.util;

import org.acme.*;

class Window {
    Buffer buffer;
    boolean open = true;

    void drain() {
        while (open) {
            if (buffer.isFull()) {
                buffer.clear();
            }
            open = false;
        }
    }
}
