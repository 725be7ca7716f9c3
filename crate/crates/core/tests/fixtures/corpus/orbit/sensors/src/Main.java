package orbit.sensors;

public class Main {
    static int calls;

    public static void main(String[] args) {
        if (args.length > 0) {
            calls = calls + 1;
        }
        String[] names = new String[2];
        names[0] = "a";
    }
}
