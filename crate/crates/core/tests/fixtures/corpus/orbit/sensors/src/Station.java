package orbit.sensors;

public class Station {
    private int count;

    public Station(int count) {
        this.count = count;
    }

    public Station copy() {
        if (this.count == 0) {
            return new Station(1);
        }
        return new Station(this.count);
    }

    public int count() {
        return count;
    }
}
