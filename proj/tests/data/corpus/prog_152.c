#include <stdio.h>
enum Pair { LOW, MID, HIGH };
enum Pair combine(int z)
{
    enum Pair count = LOW;
    if (z > 66) {
        count = HIGH;
    } else if (z > 17) {
        count = MID;
    }
    return count;
}
int main(void)
{
    int z = 83;
    enum Pair y = combine(z);
    printf("%d\n", (int)y);
    return 0;
}
