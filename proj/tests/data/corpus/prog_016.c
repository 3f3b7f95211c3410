#include <stdio.h>
long fold(int count)
{
    if (count <= 1) {
        return 1;
    }
    return count * fold(count - 1);
}
int main(void)
{
    int count = 10;
    long pos = fold(count);
    printf("%ld\n", pos);
    return 0;
}
